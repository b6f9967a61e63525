import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gseplan.planners import ConfigError, PlannerConfig
from gseplan.promenade import (
    AutomatonState,
    PromenadeSpec,
    SolutionType,
    automaton_step,
    build_promenade,
    classify_path,
    classify_polyline,
    run_automaton_study,
    type_l_optimum,
    wilson_interval,
)
from gseplan.roadmap import PathResult

S = AutomatonState


@pytest.fixture(scope="module")
def prom():
    return build_promenade(PromenadeSpec())


class TestBuild:
    def test_layout(self, prom):
        env, X_init, X_goal, _ = prom
        np.testing.assert_array_equal(env.lo, [0, 0])
        np.testing.assert_array_equal(env.hi, [4, 4])
        ob, = env.obstacles
        np.testing.assert_array_equal(ob.lo, [1, 1])
        np.testing.assert_array_equal(ob.hi, [3, 3])
        np.testing.assert_allclose(X_init, [0.95, 1.1])
        np.testing.assert_allclose(X_goal, [3.05, 1.1])

    def test_l1(self, prom):
        r = prom[3]
        assert r.in_L1([0.5, 0.5])[0]
        assert not r.in_L1([3, 3])[0]
        assert r.in_L2([3.5, 0.5])[0]

    def test_b2(self, prom):
        lo, hi = prom[3].B2
        np.testing.assert_allclose(lo, [3, 3])
        np.testing.assert_allclose(hi, [4, 4])

    def test_f2_mirrors_f_init(self, prom):
        r = prom[3]
        lo, hi = r.F_init
        mirrored = r.reflect([lo, hi])
        np.testing.assert_allclose(np.sort(mirrored[:, 0]), [r.F2[0][0], r.F2[1][0]])
        np.testing.assert_allclose(mirrored[:, 1], [r.F2[0][1], r.F2[1][1]])

    @settings(max_examples=100, deadline=None)
    @given(st.floats(0, 4), st.floats(0, 4))
    def test_reflect_twice(self, prom, x, y):
        r = prom[3]
        p = np.array([[x, y]])
        back = r.reflect(r.reflect(p))
        assert r.in_L1(back)[0] == r.in_L1(p)[0]
        assert r.in_L2(back)[0] == r.in_L2(p)[0]
        for box in (r.B1, r.B2, r.F_init, r.F1, r.F2):
            assert r.in_box(box, back)[0] == r.in_box(box, p)[0]

    @pytest.mark.parametrize("kw", [dict(gamma_f=0), dict(epsilon=0), dict(alpha=1.5), dict(gamma_f=0.6)])
    def test_invalid(self, kw):
        with pytest.raises(ConfigError):
            build_promenade(PromenadeSpec(**kw))

    @pytest.mark.parametrize("alpha", [2, 3, 4])
    def test_forward_check_passes(self, alpha):
        build_promenade(PromenadeSpec(alpha=alpha))

    def test_optimum(self):
        assert type_l_optimum(PromenadeSpec()) == pytest.approx(2.2236, abs=1e-4)


class TestClassify:
    def test_type_b(self, prom):
        path = [(0.95, 1.1), (0.5, 3.5), (3.5, 3.5), (3.05, 1.1)]
        assert classify_polyline(path, prom[3]) is SolutionType.TYPE_B

    def test_type_l(self, prom):
        path = [(0.95, 1.1), (1, 1), (3, 1), (3.05, 1.1)]
        assert classify_polyline(path, prom[3]) is SolutionType.TYPE_L

    def test_other(self, prom):
        assert classify_polyline([(0.95, 1.1), (3.05, 1.1)], prom[3]) is SolutionType.OTHER

    def test_segment_crossing_counts(self, prom):
        # no vertex inside B1 but the segment passes through it
        path = [(0.95, 1.1), (0.2, 2.9), (0.9, 3.9), (3.1, 3.9), (3.8, 2.9), (3.05, 1.1)]
        assert classify_polyline(path, prom[3]) is SolutionType.TYPE_B

    def test_unfound_raises(self, prom):
        with pytest.raises(ValueError):
            classify_path(PathResult(), np.zeros((2, 2)), prom[3])


class TestAutomaton:
    def test_reject(self, prom):
        assert automaton_step(S.INIT, [0.5, 0.5], prom[3]) is S.REJECTING

    def test_forward(self, prom):
        r = prom[3]
        assert automaton_step(S.INIT, [0.9, 3.9], r) is S.S1
        assert automaton_step(S.S1, [2.0, 3.7], r) is S.S2
        assert automaton_step(S.S2, [3.1, 3.9], r) is S.ACCEPTING

    def test_stay(self, prom):
        assert automaton_step(S.INIT, [2.0, 3.7], prom[3]) is S.INIT

    def test_accepting_absorbs(self, prom):
        assert automaton_step(S.ACCEPTING, [0.5, 0.5], prom[3]) is S.ACCEPTING

    @settings(max_examples=100, deadline=None)
    @given(st.sampled_from([S.ACCEPTING, S.REJECTING]),
           st.lists(st.tuples(st.floats(0, 4), st.floats(0, 4)), max_size=30))
    def test_absorbing(self, prom, start, seq):
        s = start
        for v in seq:
            s = automaton_step(s, v, prom[3])
        assert s is start


def test_wilson():
    lo, hi = wilson_interval(0, 100)
    assert lo == 0 and 0 < hi < 0.05
    lo, hi = wilson_interval(50, 100)
    assert lo == pytest.approx(0.4038, abs=1e-4) and hi == pytest.approx(0.5962, abs=1e-4)
    with pytest.raises(ValueError):
        wilson_interval(0, 0)


def test_zero_trials():
    with pytest.raises(ValueError):
        run_automaton_study(PromenadeSpec(), PlannerConfig(iterations=10), 0)


def test_small_study():
    res = run_automaton_study(PromenadeSpec(), PlannerConfig(iterations=150), 12, master_seed=3)
    assert res.typel_always_rejected and res.accept_always_typeb
    assert res.accept_rate + res.reject_rate + res.undecided_rate == pytest.approx(1)
    lines = res.to_csv().splitlines()
    assert lines[0] == "# gse-bench v1"
    assert lines[1] == "trial,seed,result_type,automaton_final_state,final_cost,iterations_to_first_path"
    assert len(lines) == 14
    for o in res.outcomes:
        if o.result_type != "none":
            assert math.isfinite(o.final_cost)
    again = run_automaton_study(PromenadeSpec(), PlannerConfig(iterations=150), 12, master_seed=3)
    assert again.to_csv() == res.to_csv()
