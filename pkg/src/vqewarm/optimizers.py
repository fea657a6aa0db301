"""Box-constrained local minimizers that report every accepted iterate.

Both routines call ``on_accept(x, f)`` once for the starting point and once per
accepted step, and return a short status string describing why they stopped.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

ARMIJO_C1 = 1e-4
CURVATURE_EPS = 1e-12


def projected_bfgs(
    fun: Callable[[np.ndarray], float],
    grad: Callable[[np.ndarray], np.ndarray],
    x0: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
    on_accept: Callable[[np.ndarray, float], None],
    max_iterations: int,
    energy_tolerance: float,
    step_tolerance: float,
) -> str:
    """Quasi-Newton descent with Armijo backtracking, projected onto the box.

    Coordinates pinned at a bound with the gradient pointing outward are held
    fixed for the step. Accepted energies are non-increasing by construction.
    """
    x = np.array(x0, dtype=float)
    f = fun(x)
    g = grad(x)
    on_accept(x.copy(), f)
    m = x.size
    H = np.eye(m)
    scaled = False

    for _ in range(max_iterations):
        pinned = ((x <= lower) & (g > 0)) | ((x >= upper) & (g < 0))
        gf = np.where(pinned, 0.0, g)
        if not np.any(gf):
            return "zero projected gradient"

        x_new = None
        for _attempt in range(2):
            d = -(H @ gf)
            d[pinned] = 0.0
            if d @ gf >= 0:
                H, scaled = np.eye(m), False
                d = -gf
            alpha = 1.0
            while True:
                trial = np.clip(x + alpha * d, lower, upper)
                step = trial - x
                if np.linalg.norm(step) < step_tolerance:
                    break
                f_trial = fun(trial)
                if f_trial <= f + ARMIJO_C1 * (g @ step):
                    x_new, f_new = trial, f_trial
                    break
                alpha *= 0.5
            steepest = not scaled
            if x_new is not None or not scaled:
                break
            # Stale curvature model: retry once along steepest descent.
            H, scaled = np.eye(m), False
        if x_new is None:
            return "step below tolerance"

        g_new = grad(x_new)
        s = x_new - x
        y = g_new - g
        sy = s @ y
        if sy > CURVATURE_EPS * np.linalg.norm(s) * np.linalg.norm(y):
            if not scaled:
                H = np.eye(m) * (sy / (y @ y))
                scaled = True
            rho = 1.0 / sy
            Hy = H @ y
            H = H - rho * (np.outer(s, Hy) + np.outer(Hy, s)) + (rho * rho * (y @ Hy) + rho) * np.outer(s, s)

        change = f - f_new
        x, f, g = x_new, f_new, g_new
        on_accept(x.copy(), f)
        if abs(change) < energy_tolerance:
            if not steepest:
                # Small progress under an accumulated model can mean a poor
                # search direction; confirm with one steepest-descent step.
                H, scaled = np.eye(m), False
                continue
            return "energy change below tolerance"
        if np.linalg.norm(s) < step_tolerance:
            return "step below tolerance"
    return "max iterations reached"


def spsa(
    fun: Callable[[np.ndarray], float],
    x0: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
    on_accept: Callable[[np.ndarray, float], None],
    max_iterations: int,
    energy_tolerance: float,
    step_tolerance: float,
    rng: np.random.Generator,
    perturbation: float = 0.2,
    alpha: float = 0.602,
    gamma: float = 0.101,
    target_step: float = 2 * np.pi / 10,
    calibration_samples: int = 5,
) -> str:
    """Simultaneous-perturbation stochastic approximation with standard gain decay.

    The learning rate is calibrated so that the first update has magnitude
    roughly ``target_step``. Iterates are not guaranteed to descend.
    """
    x = np.array(x0, dtype=float)
    f = fun(x)
    on_accept(x.copy(), f)

    def estimate(point, ck):
        delta = rng.choice([-1.0, 1.0], size=point.size)
        return (fun(point + ck * delta) - fun(point - ck * delta)) / (2 * ck) * delta

    mags = [np.mean(np.abs(estimate(x, perturbation))) for _ in range(calibration_samples)]
    avg = float(np.mean(mags))
    a = target_step / avg if avg > 0 else target_step

    for k in range(max_iterations):
        ak = a / (k + 1) ** alpha
        ck = perturbation / (k + 1) ** gamma
        x_new = np.clip(x - ak * estimate(x, ck), lower, upper)
        step = np.linalg.norm(x_new - x)
        f_new = fun(x_new)
        change = f - f_new
        x, f = x_new, f_new
        on_accept(x.copy(), f)
        if step < step_tolerance:
            return "step below tolerance"
        if abs(change) < energy_tolerance:
            return "energy change below tolerance"
    return "max iterations reached"
