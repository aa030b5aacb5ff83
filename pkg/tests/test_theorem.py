import numpy as np
import pytest

from conftest import event
from covshift.errors import PreconditionError
from covshift.finite_space import (
    DriftFunction,
    FiniteMeasure,
    FiniteSpace,
    Partition,
    Reweighting,
    conditional_measure,
    drift_holds,
    drift_measure,
    example3_space,
    he_implication_check,
    is_covariate_shift,
    is_sufficient,
    random_event,
    random_he_instance,
    random_measure,
    random_partition,
    random_sufficient_measure,
    sweep_theorem1,
    verify_proposition1,
    verify_theorem1,
)


class TestTheorem:
    def test_g_equals_h(self, rng):
        space = FiniteSpace.of_size(5)
        for _ in range(20):
            P = random_measure(space, rng)
            H = random_partition(space, rng)
            A = random_event(space, rng, avoid=H)
            v = verify_theorem1(P, A, H, H, seed=1)
            assert v.sufficient and v.inherited and v.witness is None

    def test_sufficient_pair(self, four):
        space, G = four
        P = FiniteMeasure.uniform(space)
        v = verify_theorem1(P, event(space, [1, 2]), G, space.singletons(), seed=0)
        assert v.sufficient and v.inherited
        assert v.a_measurable  # A is a union of singletons

    def test_insufficient_pair_has_witness(self, four):
        space, G = four
        P = FiniteMeasure.uniform(space)
        A = event(space, [1, 3])
        v = verify_theorem1(P, A, G, space.singletons(), seed=0)
        assert not v.sufficient and not v.inherited
        assert not is_covariate_shift(P, v.witness, A, G)

    def test_conditional_probes_alone_refute(self, rng):
        # with no random probes the verdict still matches sufficiency
        for _ in range(300):
            space = FiniteSpace.of_size(int(rng.integers(2, 7)))
            H = random_partition(space, rng)
            G = Partition(space, rng.integers(0, H.ncells, size=H.ncells)[H.labels])
            A = random_event(space, rng, avoid=H)
            P = random_measure(space, rng, zero_prob=0.2)
            if not 0 < P.prob(A) < 1:
                continue
            v = verify_theorem1(P, A, G, H, n_random=0)
            assert v.sufficient == v.inherited

    def test_degenerate_class_mass(self, four):
        space, G = four
        P = FiniteMeasure.from_weights(space, [1, 1, 0, 0])
        with pytest.raises(PreconditionError):
            verify_theorem1(P, event(space, [3, 4]), G, space.singletons())

    def test_example3(self):
        ex = example3_space(seed=3)
        P = ex.P
        # G independent of (label, f)
        for y in "01":
            for f in "01":
                for g in "01":
                    joint = P.mass[P.space.index_of(y + f + g)]
                    yf = sum(P.mass[P.space.index_of(y + f + h)] for h in "01")
                    pg = sum(m for o, m in zip(P.space.outcomes, P.mass) if o[2] == g)
                    assert abs(joint - yf * pg) <= 1e-12
        assert not is_sufficient(P, ex.A, ex.G, ex.H)
        v = verify_theorem1(P, ex.A, ex.G, ex.H, seed=0)
        assert not v.inherited
        assert abs(v.witness.prob(ex.A) - P.prob(ex.A)) > 1e-6

    def test_small_sweep_agrees(self):
        rows = list(sweep_theorem1(max_size=4, n_instances=6, seed=9))
        assert all(r.agree for r in rows)
        assert rows[-1].label == "example3"
        assert any(r.sufficient for r in rows) and any(not r.sufficient for r in rows)

    def test_sweep_is_deterministic(self):
        a = list(sweep_theorem1(max_size=3, n_instances=4, seed=2))
        b = list(sweep_theorem1(max_size=3, n_instances=4, seed=2))
        assert a == b


def _drift_instance(rng):
    while True:
        space = FiniteSpace.of_size(int(rng.integers(2, 9)))
        H = random_partition(space, rng)
        A = random_event(space, rng)
        has_a = np.bincount(H.labels, weights=A.mask, minlength=H.ncells) > 0
        has_b = np.bincount(H.labels, weights=~A.mask, minlength=H.ncells) > 0
        if (has_a & has_b).all():
            G = Partition(space, rng.integers(0, H.ncells, size=H.ncells)[H.labels])
            return A, G, H, random_sufficient_measure(A, G, H, rng)


class TestDrift:
    @pytest.mark.parametrize("f", [DriftFunction.identity(), DriftFunction.square(),
                                   DriftFunction.clipped_affine(0.5, 0.3)], ids=str)
    def test_carries_over(self, f, rng):
        for _ in range(100):
            A, G, H, P = _drift_instance(rng)
            assert verify_proposition1(P, A, G, H, f, Reweighting.random(P, H, rng))

    def test_target_has_drifted_posteriors(self, four):
        space, H = four
        P = FiniteMeasure.uniform(space)
        A = event(space, [1, 3])
        f = DriftFunction.square()
        Q = drift_measure(P, A, H, f, Reweighting(P, H, np.ones(2)))
        np.testing.assert_allclose(Q.mass, [0.125, 0.375, 0.125, 0.375])
        assert drift_holds(P, Q, A, H, f)

    def test_identity_is_covariate_shift(self, rng):
        A, G, H, P = _drift_instance(rng)
        Q = drift_measure(P, A, H, DriftFunction.identity(), Reweighting.random(P, H, rng))
        assert is_covariate_shift(P, Q, A, G)

    def test_requires_sufficiency(self, four):
        space, G = four
        P = FiniteMeasure.uniform(space)
        H = space.singletons()
        with pytest.raises(PreconditionError):
            verify_proposition1(P, event(space, [1, 3]), G, H, DriftFunction.square(),
                                Reweighting(P, H, np.ones(4)))


class TestHeImplication:
    def test_identity_target(self, four):
        space, H = four
        P = FiniteMeasure.from_weights(space, [1, 2, 3, 4])
        A = event(space, [1, 3])
        assert he_implication_check(P, P, A, H, H)

    def test_constructed_instances(self, rng):
        for _ in range(300):
            P, Q, A, T, H = random_he_instance(FiniteSpace.of_size(int(rng.integers(2, 9))), rng)
            assert he_implication_check(P, Q, A, T, H)

    def test_premise_violations_named(self, four):
        space, H = four
        P = FiniteMeasure.uniform(space)
        A = event(space, [1, 3])
        T = space.trivial()
        with pytest.raises(PreconditionError, match="premise"):
            he_implication_check(P, conditional_measure(P, H.cell_event(0)), A, H, H)
        Q = FiniteMeasure.from_weights(space, [1, 1, 1, 3])
        with pytest.raises(PreconditionError, match="premise"):
            he_implication_check(P, Q, A, T, H)
