import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings as hsettings, strategies as st

from cemethod.core import (CeSettings, Constraints, IterationRecord, ProblemError, ProblemSpec,
                           RunResult, SettingsError, default_settings, resolve_elite_count,
                           validate_problem)


def sphere(X):
    return np.sum(np.asarray(X) ** 2, axis=-1)


class TestValidateProblem:
    def test_well_formed_box(self):
        p = ProblemSpec(sphere, [-1, -1], [1, 1])
        assert validate_problem(p) is p
        assert p.nvars == 2

    def test_degenerate_box_reports_index(self):
        with pytest.raises(ProblemError, match="index 0"):
            validate_problem(ProblemSpec(sphere, [0, 0], [0, 1]))

    def test_dimension_mismatch(self):
        with pytest.raises(ProblemError, match="mismatch|length"):
            validate_problem(ProblemSpec(sphere, [0, 0], [1, 1, 1]))

    def test_infinite_bound_rejected(self):
        with pytest.raises(ProblemError, match="index 1"):
            validate_problem(ProblemSpec(sphere, [0, 0], [1, np.inf]))

    def test_inverted_bound_reports_index(self):
        with pytest.raises(ProblemError, match="index 1"):
            validate_problem(ProblemSpec(sphere, [0, 2], [1, 1]))

    def test_constrained_flag(self):
        p = ProblemSpec(sphere, [0], [1], Constraints(equality=lambda x: x[0]))
        assert p.is_constrained
        assert not ProblemSpec(sphere, [0], [1]).is_constrained

    def test_bounds_are_read_only(self):
        p = ProblemSpec(sphere, [0, 0], [1, 1])
        with pytest.raises(ValueError):
            p.lower_bounds[0] = 5.0


class TestDefaults:
    def test_two_variables(self):
        s = default_settings(2)
        assert s.nsamp == 100 and s.elite_factor == 0.05
        assert s.elite_count == 5
        assert (s.alpha, s.beta, s.q) == (0.7, 0.8, 5)

    def test_max_iter_scales_with_dimension(self):
        assert default_settings(30).max_iter == 3000

    def test_remaining_ledger_values(self):
        s = default_settings(3)
        assert s.max_stall == 50 and s.max_fcount is None and s.min_fval == -math.inf
        assert s.tol_abs == (1e-6,) * 3 and s.tol_rel == 1e-3
        assert s.tol_con == 1e-3 and s.tol_fun == 1e-6
        assert (s.initial_penalty, s.penalty_factor, s.penalty_cap) == (10, 10, 1e8)
        assert s.seed == 0

    def test_pure(self):
        assert default_settings(4) == default_settings(4)

    def test_rejects_zero_dimension(self):
        with pytest.raises(SettingsError):
            default_settings(0)


class TestEliteCount:
    @pytest.mark.parametrize("nsamp, rho, expected", [(100, 0.05, 5), (10, 0.01, 2), (7, 0.5, 4)])
    def test_values(self, nsamp, rho, expected):
        assert resolve_elite_count(nsamp, rho) == expected

    def test_exceeds_sample_count(self):
        with pytest.raises(SettingsError):
            resolve_elite_count(1, 0.5)

    @given(st.integers(2, 10_000), st.floats(1e-4, 0.999))
    def test_bounds(self, nsamp, rho):
        k = resolve_elite_count(nsamp, rho)
        assert k == max(math.ceil(rho * nsamp), 2)
        assert 2 <= k <= nsamp


class TestSettingsValidation:
    @pytest.mark.parametrize("field, value", [
        ("alpha", 1.5), ("alpha", 0.0), ("beta", -0.1), ("q", 0), ("nsamp", 0),
        ("elite_factor", 1.0), ("tol_rel", 0.0), ("tol_abs", (0.0,)), ("penalty_factor", 1.0),
        ("max_fcount", 0), ("seed", -1),
    ])
    def test_rejects(self, field, value):
        with pytest.raises(SettingsError):
            CeSettings(**{field: value})

    def test_alpha_one_allowed(self):
        assert CeSettings(alpha=1.0).alpha == 1.0

    def test_unknown_key(self):
        with pytest.raises(SettingsError, match="bogus"):
            CeSettings.from_dict({"bogus": 1})

    def test_tol_abs_broadcast(self):
        assert np.array_equal(CeSettings(tol_abs=(1e-4,)).tol_abs_for(3), [1e-4] * 3)
        with pytest.raises(SettingsError):
            CeSettings(tol_abs=(1e-4, 1e-4)).tol_abs_for(3)


settings_strategy = st.builds(
    CeSettings,
    nsamp=st.integers(40, 5000),
    elite_factor=st.floats(0.05, 0.5),
    max_iter=st.integers(1, 10**6),
    max_stall=st.integers(1, 1000),
    max_fcount=st.one_of(st.none(), st.integers(1, 10**9)),
    min_fval=st.one_of(st.just(-math.inf), st.floats(-1e6, 1e6)),
    tol_abs=st.lists(st.floats(1e-12, 1.0), min_size=1, max_size=5).map(tuple),
    tol_rel=st.floats(1e-9, 1.0),
    tol_con=st.floats(1e-9, 1.0),
    tol_fun=st.floats(1e-12, 1.0),
    alpha=st.floats(0.01, 1.0),
    beta=st.floats(0.0, 5.0),
    q=st.integers(1, 20),
    verbose=st.booleans(),
    seed=st.integers(0, 2**32 - 1),
)


@given(settings_strategy)
@hsettings(max_examples=60)
def test_settings_round_trip(s):
    assert CeSettings.loads(s.dumps()) == s
    assert CeSettings.from_dict(s.to_dict()) == s


def test_settings_file(tmp_path):
    path = tmp_path / "ce.json"
    path.write_text('{"nsamp": 300, "alpha": 0.9}')
    s = CeSettings.load(path, base=default_settings(2))
    assert s.nsamp == 300 and s.alpha == 0.9 and s.tol_abs == (1e-6, 1e-6)


def _record(t, **kw):
    base = dict(iter=t, xmean=np.zeros(2), xmedian=np.zeros(2), xbest=np.ones(2), fmean=1.0,
                fmedian=1.0, fbest=0.5, sigma=np.ones(2), error_s=math.inf, error_c=0.0, fcount=10 * t)
    base.update(kw)
    return IterationRecord(**base)


def test_record_dict_round_trip_with_nan():
    r = _record(1, gamma=math.nan, fmean=math.nan)
    assert IterationRecord.from_dict(r.to_dict()) == r


def test_run_result_accessors():
    hist = [_record(1), _record(2, fbest=0.25)]
    res = RunResult(np.ones(2), 0.25, 5, True, hist)
    assert res.niter == 2 and res.fcount == 20
    assert res.message == "standard deviation convergence"
    assert np.array_equal(res.column("fbest"), [0.5, 0.25])


def test_settings_immutable():
    s = CeSettings()
    with pytest.raises(dataclasses.FrozenInstanceError):
        s.nsamp = 5
