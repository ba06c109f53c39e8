import numpy as np
import pytest

from causalcones import causal_group as cg
from causalcones import events as ev
from causalcones.errors import InputError

UNIT_BOX_1 = ([-1.0, -1.0], [1.0, 1.0])
CYL_BOX = ([0.0, -1.0], [1.0, 1.0])


def dfs_reachability(bits):
    """Path-existence oracle for the closure kernels."""
    n = len(bits)
    out = np.zeros_like(bits)
    for s in range(n):
        seen = set()
        stack = [v for v in range(n) if bits[s, v]]
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            stack.extend(w for w in range(n) if bits[v, w])
        out[s, list(seen)] = True
    return out


def related_fraction_quadrature(grid=40):
    """Geometric oracle for the chronological pair fraction in the unit box
    (q = 1): dense grid double count of ordered pairs with dt > |dy|."""
    ts = np.linspace(-1, 1, grid)
    ys = np.linspace(-1, 1, grid)
    t1, y1, t2, y2 = np.meshgrid(ts, ys, ts, ys, indexing="ij")
    related = (t2 - t1) > np.abs(y2 - y1)
    return float(related.mean())


class TestSprinkle:
    def test_single_event(self):
        e = ev.sprinkle(1, 1, UNIT_BOX_1, seed=0)
        assert e.n == 1
        rel = ev.causal_relation(e)
        assert rel.bits.tolist() == [[True]]

    def test_deterministic(self):
        a = ev.sprinkle(1, 200, UNIT_BOX_1, seed=42)
        b = ev.sprinkle(1, 200, UNIT_BOX_1, seed=42)
        assert np.array_equal(a.events, b.events)
        assert not np.array_equal(a.events, ev.sprinkle(1, 200, UNIT_BOX_1, seed=43).events)

    def test_related_fraction_matches_geometry(self):
        oracle = related_fraction_quadrature()
        e = ev.sprinkle(1, 500, UNIT_BOX_1, seed=9)
        bits = ev.chronological_relation(e).bits
        frac = bits.sum() / (e.n * e.n)
        assert frac == pytest.approx(oracle, abs=0.02)

    def test_degenerate_box_rejected(self):
        with pytest.raises(InputError):
            ev.sprinkle(1, 5, ([0, 0], [0, 1]), seed=0)

    def test_events_stay_in_box(self):
        e = ev.sprinkle(2, 100, ([-1, -2, -3], [1, 0, 4]), seed=5)
        lo, hi = e.box
        assert (e.events >= lo).all() and (e.events <= hi).all()


class TestChronological:
    def test_forward_pair(self):
        e = ev.EventSet(1, [[0, 0], [1, 0]], UNIT_BOX_1)
        bits = ev.chronological_relation(e).bits
        assert bits[0, 1] and not bits[1, 0]

    def test_null_pair_not_chronological(self):
        e = ev.EventSet(1, [[0, 0], [1, 1]], UNIT_BOX_1)
        assert not ev.chronological_relation(e).bits.any()

    def test_periodic_lift_creates_loop(self):
        e = ev.EventSet(1, [[0.1, 0], [0.9, 0]], CYL_BOX, periodic_time=1.0)
        bits = ev.chronological_relation(e).bits
        assert bits[0, 1] and bits[1, 0]

    def test_irreflexive_on_flat_samples(self):
        e = ev.sprinkle(1, 100, UNIT_BOX_1, seed=2)
        assert not np.diagonal(ev.chronological_relation(e).bits).any()


class TestCausal:
    def test_null_pair_is_causal(self):
        e = ev.EventSet(1, [[0, 0], [1, 1]], UNIT_BOX_1)
        assert ev.causal_relation(e).bits[0, 1]

    def test_reflexive(self):
        e = ev.sprinkle(2, 30, ([-1, -1, -1], [1, 1, 1]), seed=1)
        assert np.diagonal(ev.causal_relation(e).bits).all()

    def test_transitive_by_geometry(self):
        e = ev.sprinkle(1, 250, UNIT_BOX_1, seed=3)
        rel = ev.causal_relation(e)
        assert ev.transitive_closure(rel) == rel


class TestKRelation:
    def test_closed_equals_causal_on_flat(self):
        for seed in (0, 1, 2):
            e = ev.sprinkle(1, 200, UNIT_BOX_1, seed=seed)
            k = ev.k_relation(e, "closed")
            assert np.array_equal(k.bits, ev.causal_relation(e).bits)

    def test_ideal_contains_timelike_compositions(self):
        e = ev.EventSet(1, [[0, 0], [0.3, 0.1], [0.8, 0.05]], UNIT_BOX_1)
        k = ev.k_relation(e, "ideal")
        assert k.bits[0, 2]

    def test_cylinder_not_antisymmetric(self):
        e = ev.sprinkle(1, 30, CYL_BOX, seed=4, periodic_time=1.0)
        ok, witnesses = ev.is_partial_order(ev.k_relation(e, "closed"))
        assert not ok and witnesses

    def test_monotone_chain(self):
        e = ev.sprinkle(1, 150, UNIT_BOX_1, seed=6)
        chron = ev.reflexive_closure(ev.transitive_closure(ev.chronological_relation(e)))
        ideal = ev.k_relation(e, "ideal")
        closed = ev.k_relation(e, "closed")
        assert not (chron.bits & ~ideal.bits).any()
        assert not (ideal.bits & ~closed.bits).any()


class TestClosures:
    def test_adds_transitive_pair(self):
        bits = np.zeros((3, 3), dtype=bool)
        bits[0, 1] = bits[1, 2] = True
        closed = ev.transitive_closure(ev.Relation(bits))
        assert closed.bits[0, 2]

    def test_idempotent_and_monotone(self):
        rng = np.random.default_rng(8)
        for _ in range(30):
            bits = rng.random((10, 10)) < 0.2
            rel = ev.Relation(bits)
            once = ev.transitive_closure(rel)
            assert ev.transitive_closure(once) == once
            assert not (bits & ~once.bits).any()

    def test_matches_dfs_oracle(self):
        rng = np.random.default_rng(9)
        for _ in range(50):
            bits = rng.random((8, 8)) < 0.25
            assert np.array_equal(ev.transitive_closure(ev.Relation(bits)).bits,
                                  dfs_reachability(bits))

    def test_reflexive_closure(self):
        rel = ev.Relation(np.zeros((4, 4), dtype=bool))
        assert np.array_equal(ev.reflexive_closure(rel).bits, np.eye(4, dtype=bool))


class TestOrderPredicates:
    def test_identity_is_partial_order(self):
        ok, wit = ev.is_partial_order(ev.Relation(np.eye(4, dtype=bool)))
        assert ok and not wit

    def test_quasi_order_needs_transitivity(self):
        bits = np.eye(3, dtype=bool)
        bits[0, 1] = bits[1, 2] = True
        assert not ev.is_quasi_order(ev.Relation(bits))
        assert ev.is_quasi_order(ev.transitive_closure(ev.Relation(bits)))

    def test_flat_k_is_partial_order(self):
        e = ev.sprinkle(3, 120, ([-1] * 4, [1] * 4), seed=10)
        ok, wit = ev.is_partial_order(ev.k_relation(e, "closed"))
        assert ok and not wit


class TestCones:
    def test_reflexive_membership(self):
        rel = ev.reflexive_closure(ev.Relation(np.zeros((3, 3), dtype=bool)))
        assert 1 in ev.u_cone(rel, 1)

    def test_three_chain(self):
        bits = np.triu(np.ones((3, 3), dtype=bool))
        assert ev.u_cone(ev.Relation(bits), 0).tolist() == [0, 1, 2]
        assert ev.down_cone(ev.Relation(bits), 0).tolist() == [0]

    def test_index_error(self):
        with pytest.raises(InputError):
            ev.u_cone(ev.Relation(np.eye(2, dtype=bool)), 5)


class TestInterval:
    def test_open_interval_empty_when_unrelated(self):
        e = ev.EventSet(1, [[0, 0], [0.1, 0.9]], UNIT_BOX_1)
        assert len(ev.interval(e, 0, 1, "open")) == 0

    def test_degenerate_endpoints(self):
        e = ev.sprinkle(1, 20, UNIT_BOX_1, seed=11)
        assert ev.interval(e, 3, 3, "closed").tolist() == [3]
        assert ev.interval(e, 3, 3, "open").tolist() == []

    def test_open_subset_of_closed(self):
        e = ev.sprinkle(1, 120, UNIT_BOX_1, seed=12)
        for a in range(0, 120, 17):
            for b in range(0, 120, 13):
                assert set(ev.interval(e, a, b, "open")) <= set(ev.interval(e, a, b, "closed"))

    def test_interval_traces_separate_all_pairs(self):
        # the Hausdorff proxy: virtual-endpoint diamond traces are singletons
        # on a dense flat sample, so every pair of events is separated
        e = ev.sprinkle(1, 250, UNIT_BOX_1, seed=13)
        traces, eps = ev.diamond_traces(e)
        assert eps > 0
        assert np.array_equal(traces, np.eye(e.n, dtype=bool))

    def test_tightest_sample_intervals_separate_far_pairs(self):
        # with sample endpoints, well-separated bulk events get disjoint
        # open intervals; exhaustive over such pairs
        e = ev.sprinkle(1, 250, UNIT_BOX_1, seed=13)
        chron = ev.chronological_relation(e).bits
        has_both = np.flatnonzero(chron.any(axis=0) & chron.any(axis=1))

        def tightest(p):
            preds = np.flatnonzero(chron[:, p])
            succs = np.flatnonzero(chron[p])
            best = None
            for a in preds[np.argsort(e.events[preds, 0])[::-1][:5]]:
                for b in succs[np.argsort(e.events[succs, 0])[:5]]:
                    members = frozenset(ev.interval(e, a, b, "open"))
                    if best is None or len(members) < len(best):
                        best = members
            return best

        sep = (np.abs(e.events[:, None, 0] - e.events[None, :, 0])
               + np.abs(e.events[:, None, 1] - e.events[None, :, 1]))
        checked = 0
        for i, p in enumerate(has_both[:30]):
            for q in has_both[i + 1:30]:
                if sep[p, q] < 0.5:
                    continue
                sp, sq = tightest(p), tightest(q)
                assert p in sp and q in sq
                assert sp.isdisjoint(sq), (p, q)
                checked += 1
        assert checked > 50


class TestConePreserving:
    def test_identity(self):
        e = ev.sprinkle(1, 50, UNIT_BOX_1, seed=14)
        r = ev.causal_relation(e)
        ok, wit = ev.cone_preserving_check(r, r, np.arange(e.n))
        assert ok and not wit

    def test_chain_to_antichain_fails(self):
        chain = ev.Relation(np.array([[1, 1], [0, 1]], dtype=bool))
        anti = ev.Relation(np.eye(2, dtype=bool))
        ok, wit = ev.cone_preserving_check(chain, anti, np.arange(2))
        assert not ok
        assert wit[0][0] == 0

    def test_boost_preserves_relations(self):
        e = ev.sprinkle(2, 120, ([-1, -1, -1], [1, 1, 1]), seed=15)
        f = cg.random_causal_element(2, 4, seed=16)
        moved = f.apply(e.events)
        box = (moved.min(axis=0) - 1e-9, moved.max(axis=0) + 1e-9)
        e2 = ev.EventSet(2, moved, box)
        r = ev.causal_relation(e)
        s = ev.causal_relation(e2)
        ok, wit = ev.cone_preserving_check(r, s, np.arange(e.n))
        assert ok, wit


class TestHierarchy:
    def test_flat_sample_all_flags(self):
        rep = ev.hierarchy_report(ev.sprinkle(1, 200, UNIT_BOX_1, seed=17))
        assert all(rep.flags().values())
        assert rep.witnesses == {}

    def test_cylinder_reports_loop(self):
        rep = ev.hierarchy_report(ev.sprinkle(1, 60, CYL_BOX, seed=18, periodic_time=1.0))
        assert not rep.chronology_ok
        assert rep.witnesses["chronology"]
        i, j = rep.witnesses["chronology"][0]
        chron = ev.transitive_closure(
            ev.chronological_relation(ev.sprinkle(1, 60, CYL_BOX, seed=18, periodic_time=1.0)))
        assert chron.bits[i, j] and chron.bits[j, i]

    def test_single_event_vacuous(self):
        rep = ev.hierarchy_report(ev.sprinkle(3, 1, ([-1] * 4, [1] * 4), seed=19))
        assert all(rep.flags().values())

    def test_hierarchy_implications_across_seeds(self):
        for seed in range(30):
            flat = ev.hierarchy_report(ev.sprinkle(1, 80, UNIT_BOX_1, seed=seed))
            cyl = ev.hierarchy_report(
                ev.sprinkle(1, 40, CYL_BOX, seed=seed, periodic_time=1.0))
            for rep in (flat, cyl):
                if rep.k_causal_ok:
                    assert rep.strongly_causal_proxy
                    assert rep.reflecting_ok
                if rep.strongly_causal_proxy:
                    assert rep.future_distinguishing and rep.past_distinguishing

    def test_penrose_composition_exhaustive(self):
        for seed in (20, 21):
            e = ev.sprinkle(1, 300, UNIT_BOX_1, seed=seed)
            i_bits = ev.chronological_relation(e).bits
            j_bits = ev.causal_relation(e).bits
            f = lambda m: m.astype(np.float32)
            mixed1 = (f(i_bits) @ f(j_bits)) > 0
            mixed2 = (f(j_bits) @ f(i_bits)) > 0
            assert i_bits[mixed1].all()
            assert i_bits[mixed2].all()

    def test_flags_invariant_under_causal_maps(self):
        e = ev.sprinkle(1, 80, UNIT_BOX_1, seed=22)
        base = ev.hierarchy_report(e).flags()
        for seed in range(20):
            f = cg.random_causal_element(1, 3, seed=seed)
            moved = f.apply(e.events)
            box = (moved.min(axis=0) - 1e-9, moved.max(axis=0) + 1e-9)
            rep = ev.hierarchy_report(ev.EventSet(1, moved, box))
            assert rep.flags() == base


class TestEventSetValidation:
    def test_duplicate_events_rejected(self):
        with pytest.raises(InputError):
            ev.EventSet(1, [[0, 0], [0, 0]], UNIT_BOX_1)

    def test_outside_box_rejected(self):
        with pytest.raises(InputError):
            ev.EventSet(1, [[5, 0]], UNIT_BOX_1)

    def test_periodic_time_wrap_allowed(self):
        e = ev.EventSet(1, [[2.3, 0]], CYL_BOX, periodic_time=1.0)
        assert e.n == 1
