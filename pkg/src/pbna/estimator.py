"""scikit-learn style wrappers.

``PBNAFeasibilityClassifier`` maps networks to feasible / infeasible.
``PBNASimulator`` is fitted on one network, then ``transform`` sends
source symbols through the aligned channel and ``inverse_transform``
decodes them.  Networks can be given as ``Network`` objects, graph
dicts, JSON text or paths.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .feasibility import FeasibilityParams, FeasibilityReport, check_feasibility
from .netgraph import ExtendedNetwork, Network, extend, network_from_dict, parse_network
from .simulate import InfeasibleError, SimParams, build_scheme, choose_scheme


def as_extended(obj) -> ExtendedNetwork:
    if isinstance(obj, ExtendedNetwork):
        return obj
    if isinstance(obj, Network):
        return extend(obj)
    if isinstance(obj, dict):
        return extend(network_from_dict(obj))
    if isinstance(obj, Path):
        return extend(parse_network(obj.read_bytes()))
    if isinstance(obj, (str, bytes)):
        text = obj.strip() if isinstance(obj, str) else obj.strip().decode()
        if text.startswith("{"):
            return extend(parse_network(text))
        return extend(parse_network(Path(text).read_bytes()))
    raise TypeError(f"cannot interpret {type(obj).__name__} as a network")


class PBNAFeasibilityClassifier(ClassifierMixin, BaseEstimator):
    """Predicts alignment feasibility; nothing is learned from ``y``."""

    def __init__(self, m=16, trials=32, seed=0, n=2, oracle="auto"):
        self.m = m
        self.trials = trials
        self.seed = seed
        self.n = n
        self.oracle = oracle

    def _params(self) -> FeasibilityParams:
        return FeasibilityParams(m=self.m, trials=self.trials, seed=self.seed, n=self.n, oracle=self.oracle)

    def fit(self, X=None, y=None):
        self.params_ = self._params()
        self.classes_ = np.array([False, True])
        return self

    def reports(self, X) -> list[FeasibilityReport]:
        check_is_fitted(self, "params_")
        return [check_feasibility(as_extended(x), self.params_) for x in X]

    def predict(self, X) -> np.ndarray:
        return np.array([r.feasible for r in self.reports(X)], dtype=bool)


class PBNASimulator(TransformerMixin, BaseEstimator):
    """Aligned channel for one network.

    ``X`` has one row per message and ``L1 + 2 L2`` columns: the symbols of
    sources 1, 2 and 3 concatenated.  ``transform`` returns the three
    received vectors concatenated (``3 L`` columns).
    """

    def __init__(self, n=2, m=16, seed=0, trials=32, max_resamples=64, force=False, oracle="auto"):
        self.n = n
        self.m = m
        self.seed = seed
        self.trials = trials
        self.max_resamples = max_resamples
        self.force = force
        self.oracle = oracle

    def fit(self, X, y=None):
        params = SimParams(
            n=self.n,
            m=self.m,
            seed=self.seed,
            max_resamples=self.max_resamples,
            trials=self.trials,
            force=self.force,
            oracle=self.oracle,
        )
        xnet = as_extended(X)
        report = check_feasibility(xnet, params.feasibility_params())
        if not report.feasible and not self.force:
            raise InfeasibleError(report, f"network is not alignment-feasible ({report.regime})")
        scheme = choose_scheme(report, self.force)
        self.report_ = report
        self.scheme_ = build_scheme(xnet, params, scheme, distinct_eta=report.regime != "eta_constant")
        return self

    def _split(self, row, sizes):
        out, k = [], 0
        for s in sizes:
            out.append([int(v) for v in row[k : k + s]])
            k += s
        return out

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "scheme_")
        s = self.scheme_
        X = np.asarray(X, dtype=np.int64)
        if X.ndim != 2 or X.shape[1] != s.L1 + 2 * s.L2:
            raise ValueError(f"expected shape (k, {s.L1 + 2 * s.L2}), got {X.shape}")
        rows = []
        for row in X:
            x1, x2, x3 = self._split(row, (s.L1, s.L2, s.L2))
            for v in (*x1, *x2, *x3):
                s.field.check(v)
            Z = s.encode({1: x1, 2: x2, 3: x3})
            rows.append(Z[1] + Z[2] + Z[3])
        return np.array(rows, dtype=np.int64).reshape(len(rows), 3 * s.L)

    def inverse_transform(self, Z) -> np.ndarray:
        """Decoded sources; rows for which some receiver is singular raise."""
        check_is_fitted(self, "scheme_")
        s = self.scheme_
        Z = np.asarray(Z, dtype=np.int64)
        rows = []
        for row in Z:
            z1, z2, z3 = self._split(row, (s.L, s.L, s.L))
            dec = s.decode({1: z1, 2: z2, 3: z3})
            if any(v is None for v in dec.values()):
                raise ValueError("some receiver's decoding matrix is singular")
            rows.append(dec[1] + dec[2] + dec[3])
        return np.array(rows, dtype=np.int64).reshape(len(rows), s.L1 + 2 * s.L2)
