"""Run a scenario end to end: leading order, series, oracle and growth fits."""

from dataclasses import dataclass

import numpy as np

from .dyson import series_corrections
from .oracle import evolve_exact
from .secular import secularity_report


@dataclass
class Analysis:
    scenario: object
    frame: object
    series: dict
    report: dict
    trajectory: object = None
    fidelity: dict = None

    @property
    def validity_ratio(self):
        return np.asarray(self.frame.validity_ratio())


def partial_sum_fidelity(series, trajectory):
    """|<psi_exact|psi_ps>|^2 / ||psi_ps||^2 of the highest partial sum at each output time."""
    ps = series.partial_sums[-1]
    exact = trajectory.states[series.indices]
    overlap = np.einsum("ka,ka->k", exact.conj(), ps)
    return np.abs(overlap) ** 2 / np.einsum("ka,ka->k", ps.conj(), ps).real


def analyze(scenario, max_order=2, modes=("raw", "resummed"), oracle=True, substeps=4, window=None):
    frame = scenario.leading_order()
    series = {m: series_corrections(frame, scenario.psi0, max_order, m) for m in modes}
    report = secularity_report(series, frame, window)
    report["scenario"] = scenario.metadata
    traj = fid = None
    if oracle:
        traj = evolve_exact(
            scenario.hamiltonian, scenario.psi0, scenario.grid, substeps, scenario.hbar
        )
        fid = {m: partial_sum_fidelity(s, traj) for m, s in series.items()}
        report["oracle"] = {
            "substeps": int(substeps),
            "max_estimated_error": float(np.max(traj.estimated_error)),
            "max_infidelity": {m: float(np.max(1.0 - f)) for m, f in fid.items()},
        }
    return Analysis(scenario, frame, series, report, traj, fid)
