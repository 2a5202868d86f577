"""Islanded-microgrid frequency dynamics.

Single-swing-equation model of the island: rotor inertia with load damping,
plus first-order governor and turbine lags closed through a droop loop.  The
transfer function from a load step -dP_L (per unit) to the frequency
deviation dw (per unit) is

        (1 + tau_g s)(1 + tau_T s)
    -----------------------------------------
    (2 H s + D)(1 + tau_g s)(1 + tau_T s) + 1/R

realized here in controllable canonical form and integrated with a classical
fixed-step 4th-order Runge-Kutta scheme.  All public types are immutable and
every operation is a pure function, so concurrent evaluation is safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InstabilityError, ParameterError, StepSizeError

STANDARD_FREQUENCIES_HZ = (50.0, 60.0)

INERTIA_POLICIES = ("constant", "proportional")


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class GridParams:
    """Dynamic-model parameter bundle for the islanded fleet.

    h_inertia_s   per-unit inertia constant H on the s_base [s]
    d_damping     load change (pu) per frequency change (pu)
    r_droop       speed regulation, per unit (1/R is the primary stiffness)
    tau_g_s       governor time constant [s]
    tau_t_s       turbine time constant [s]
    f_nominal_hz  system nominal frequency [Hz]
    s_base_mva    per-unit power base [MVA]
    """

    h_inertia_s: float
    d_damping: float
    r_droop: float
    tau_g_s: float
    tau_t_s: float
    f_nominal_hz: float = 60.0
    s_base_mva: float = 100.0
    nonstandard_frequency_ok: bool = False

    def __post_init__(self):
        for name in ("h_inertia_s", "d_damping", "r_droop", "tau_g_s",
                     "tau_t_s", "f_nominal_hz", "s_base_mva"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value)):
                raise ParameterError(f"{name} must be a finite number, got {value!r}")
            if value <= 0:
                raise ParameterError(f"{name} must be strictly positive, got {value!r}")
        if (self.f_nominal_hz not in STANDARD_FREQUENCIES_HZ
                and not self.nonstandard_frequency_ok):
            raise ParameterError(
                f"f_nominal_hz must be one of {STANDARD_FREQUENCIES_HZ} "
                f"unless nonstandard_frequency_ok is set, got {self.f_nominal_hz}")

    @property
    def omega_s(self) -> float:
        """Nominal electrical angular velocity [rad/s]."""
        return 2.0 * math.pi * self.f_nominal_hz

    @property
    def stiffness(self) -> float:
        """Composite frequency-response stiffness D + 1/R [pu/pu]."""
        return self.d_damping + 1.0 / self.r_droop


@dataclass(frozen=True)
class StateSpaceModel:
    """dX/dt = A X + B u, dw = C X, with input u = -dP_L (per unit)."""

    a_matrix: np.ndarray
    b_vector: np.ndarray
    c_vector: np.ndarray
    params: GridParams
    state_dim: int = 3

    def dc_gain(self) -> float:
        """Static gain -C A^-1 B; equals 1/(D + 1/R) for a valid model."""
        return float(-self.c_vector @ np.linalg.solve(self.a_matrix, self.b_vector))

    def poles(self) -> np.ndarray:
        return np.linalg.eigvals(self.a_matrix)


@dataclass(frozen=True)
class FrequencyTrace:
    """Uniformly sampled frequency-deviation trajectory (per unit)."""

    dt: float
    samples: np.ndarray
    f_nominal_hz: float

    def __post_init__(self):
        if self.dt <= 0:
            raise ParameterError(f"dt must be positive, got {self.dt}")
        samples = _readonly(self.samples)
        if samples.ndim != 1 or samples.size < 2:
            raise ParameterError("samples must be a 1-d series with length >= 2")
        if not np.all(np.isfinite(samples)):
            raise ParameterError("samples must all be finite")
        object.__setattr__(self, "samples", samples)

    @property
    def times(self) -> np.ndarray:
        return _readonly(np.arange(self.samples.size) * self.dt)

    @property
    def duration_s(self) -> float:
        return (self.samples.size - 1) * self.dt

    def in_hz(self) -> np.ndarray:
        return _readonly(self.samples * self.f_nominal_hz)


@dataclass(frozen=True)
class TransientMetrics:
    """Overshoot/settling figures extracted from a FrequencyTrace."""

    max_deviation_hz: float
    steady_state_deviation_hz: float
    settling_time_s: float
    settling_band_hz: float
    settled: bool = True


def build_state_space(params: GridParams) -> StateSpaceModel:
    """Expand the load-to-frequency transfer function into state space.

    Denominator (2Hs + D)(1 + tau_g s)(1 + tau_T s) + 1/R expands to the
    cubic a3 s^3 + a2 s^2 + a1 s + a0; the numerator (1 + tau_g s)(1 + tau_T s)
    to b2 s^2 + b1 s + b0.  Controllable canonical form keeps the realization
    concrete and testable.
    """
    h, d = params.h_inertia_s, params.d_damping
    tg, tt = params.tau_g_s, params.tau_t_s

    a3 = 2.0 * h * tg * tt
    a2 = 2.0 * h * (tg + tt) + d * tg * tt
    a1 = 2.0 * h + d * (tg + tt)
    a0 = d + 1.0 / params.r_droop
    b2, b1, b0 = tg * tt, tg + tt, 1.0

    a = np.array([[0.0, 1.0, 0.0],
                  [0.0, 0.0, 1.0],
                  [-a0 / a3, -a1 / a3, -a2 / a3]])
    b = np.array([0.0, 0.0, 1.0])
    c = np.array([b0 / a3, b1 / a3, b2 / a3])
    return StateSpaceModel(_readonly(a), _readonly(b), _readonly(c), params)


def steady_state_deviation(params: GridParams, delta_p_load_pu: float) -> float:
    """Post-droop steady-state frequency deviation for a load step [pu].

    Positive delta_p_load_pu means added load or lost generation, so the
    result is negative for a deficit.
    """
    if not math.isfinite(delta_p_load_pu):
        raise ParameterError(f"delta_p_load_pu must be finite, got {delta_p_load_pu!r}")
    return -delta_p_load_pu / params.stiffness


def simulate_response(model: StateSpaceModel, delta_p_load_pu: float,
                      dt: float = 1e-3, t_end: float = 30.0) -> FrequencyTrace:
    """Integrate the step response dw(t) for a load step of delta_p_load_pu.

    Classical RK4 with fixed step dt.  For this linear plant with a constant
    input the RK4 update collapses to the affine recurrence x+ = R x + s,
    which is precomputed once and then iterated.
    """
    params = model.params
    if not math.isfinite(delta_p_load_pu):
        raise ParameterError(f"delta_p_load_pu must be finite, got {delta_p_load_pu!r}")
    if dt <= 0:
        raise ParameterError(f"dt must be positive, got {dt}")
    if t_end < 10.0 * dt:
        raise ParameterError(f"t_end must be at least 10*dt, got {t_end} with dt={dt}")
    dt_max = min(params.tau_g_s, params.tau_t_s) / 4.0
    if dt > dt_max:
        raise StepSizeError(
            f"dt={dt} exceeds accuracy guard min(tau_g, tau_T)/4 = {dt_max:.6g}")

    n_steps = int(round(t_end / dt))
    u = -delta_p_load_pu
    a = model.a_matrix
    ha = dt * a
    ha2 = ha @ ha
    r = np.eye(3) + ha + ha2 / 2.0 + (ha2 @ ha) / 6.0 + (ha2 @ ha2) / 24.0
    s_vec = dt * (np.eye(3) + ha / 2.0 + ha2 / 6.0 + (ha2 @ ha) / 24.0) @ model.b_vector * u

    r00, r01, r02 = r[0]
    r10, r11, r12 = r[1]
    r20, r21, r22 = r[2]
    s0, s1, s2 = s_vec
    c0, c1, c2 = model.c_vector

    bound = 10.0 * abs(steady_state_deviation(params, delta_p_load_pu)) + 1.0
    out = np.empty(n_steps + 1)
    out[0] = 0.0
    x0 = x1 = x2 = 0.0
    for k in range(1, n_steps + 1):
        y0 = r00 * x0 + r01 * x1 + r02 * x2 + s0
        y1 = r10 * x0 + r11 * x1 + r12 * x2 + s1
        y2 = r20 * x0 + r21 * x1 + r22 * x2 + s2
        x0, x1, x2 = y0, y1, y2
        out[k] = c0 * x0 + c1 * x1 + c2 * x2
    worst = float(np.max(np.abs(out)))
    if not math.isfinite(worst) or worst > bound:
        raise InstabilityError(
            f"trajectory reached {worst:.6g} pu, beyond guard {bound:.6g} pu; "
            f"check dt against the plant time constants")
    return FrequencyTrace(dt=dt, samples=out, f_nominal_hz=params.f_nominal_hz)


def transient_metrics(trace: FrequencyTrace, settling_band_hz: float = 0.05) -> TransientMetrics:
    """Peak deviation, steady state, and settling time of a trace.

    Steady state is read from the terminal sample.  Settling time is the time
    of the first sample after which the trace never leaves the +/- band
    around that value.  The trace is flagged unsettled when it only enters
    the band at its very last sample.
    """
    if settling_band_hz <= 0:
        raise ParameterError(f"settling_band_hz must be positive, got {settling_band_hz}")
    if trace.samples.size < 10:
        raise ParameterError(
            f"trace too short for metrics: {trace.samples.size} samples, need >= 10")

    f_hz = trace.samples * trace.f_nominal_hz
    ss_hz = float(f_hz[-1])
    outside = np.abs(f_hz - ss_hz) > settling_band_hz
    if outside.any():
        last_outside = int(np.flatnonzero(outside)[-1])
        settle_idx = last_outside + 1
    else:
        settle_idx = 0
    return TransientMetrics(
        max_deviation_hz=float(np.max(np.abs(f_hz))),
        steady_state_deviation_hz=ss_hz,
        settling_time_s=settle_idx * trace.dt,
        settling_band_hz=settling_band_hz,
        settled=settle_idx < f_hz.size - 1,
    )


def update_inertia(fleet_h_mva_s: float, committed_delta_p_mw: float,
                   policy: str, s_base_mva: float) -> float:
    """New inertia constant H after committing extra capacity.

    fleet_h_mva_s is the aggregate stored kinetic energy (MW s) of the online
    fleet; s_base_mva the online capacity before the step, so the prior H is
    fleet_h_mva_s / s_base_mva.  Policy 'constant' keeps H; 'proportional'
    scales it with the post-commitment online capacity.
    """
    if policy not in INERTIA_POLICIES:
        raise ParameterError(f"unknown inertia policy {policy!r}, expected one of {INERTIA_POLICIES}")
    if fleet_h_mva_s <= 0:
        raise ParameterError(f"fleet_h_mva_s must be positive, got {fleet_h_mva_s}")
    if s_base_mva <= 0:
        raise ParameterError(f"s_base_mva must be positive, got {s_base_mva}")
    h_prior = fleet_h_mva_s / s_base_mva
    if policy == "constant":
        return h_prior
    h_new = h_prior * (s_base_mva + committed_delta_p_mw) / s_base_mva
    if h_new <= 0:
        raise ParameterError(
            f"committed_delta_p_mw={committed_delta_p_mw} would drive H non-positive")
    return h_new
