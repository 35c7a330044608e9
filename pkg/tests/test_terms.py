from hypothesis import given
from hypothesis import strategies as st

from psiforge.dcrpsi import DcrAssertion
from psiforge.terms import Var, fresh_name, is_ground, match, names_of, rename, sort_key, subst, vars_of

NAMES = st.sampled_from(["a", "b", "c", "d"])
VARS = st.sampled_from([Var("x"), Var("y"), Var("z")])
LEAVES = st.one_of(NAMES, VARS, st.integers(0, 3))
TERMS = st.recursive(
    LEAVES,
    lambda inner: st.one_of(st.tuples(inner, inner), st.frozensets(NAMES, max_size=3)),
    max_leaves=8,
)


class TestMatch:
    def test_pi_input(self):
        x = Var("x")
        assert match([x], x, "b") == {x: "b"}

    def test_quadruple(self):
        xs = [Var("X_E"), Var("X_R"), Var("X_I"), Var("X_G")]
        msg = DcrAssertion(frozenset({"a"}), frozenset(), frozenset({"a", "b"}), 0)
        got = match(xs, DcrAssertion(*xs), msg)
        assert got == dict(zip(xs, msg))

    def test_inconsistent_binding(self):
        x = Var("x")
        assert match([x], (x, x), ("a", "b")) is None

    def test_shape_mismatch(self):
        x = Var("x")
        assert match([x], (x, "a"), ("a", "b")) is None
        assert match([x], (x,), "a") is None

    @given(TERMS, st.dictionaries(VARS, NAMES))
    def test_match_inverts_substitution(self, pattern, binding):
        xs = sorted(vars_of(pattern))
        full = {x: binding.get(x, "a") for x in xs}
        message = subst(pattern, full)
        got = match(xs, pattern, message)
        assert got is not None
        assert subst(pattern, got) == message


class TestSubstitution:
    @given(TERMS)
    def test_ground_iff_no_vars(self, t):
        assert is_ground(t) == (not vars_of(t))

    @given(TERMS, VARS, NAMES)
    def test_subst_removes_one_variable(self, t, x, n):
        before = vars_of(t)
        after = vars_of(subst(t, {x: n}))
        assert after == before - {x}

    def test_rename_reaches_names_only(self):
        t = ("a", Var("a"), frozenset({"a", "b"}))
        assert rename(t, {"a": "c"}) == ("c", Var("a"), frozenset({"c", "b"}))


class TestFreshNames:
    def test_avoids_used(self):
        assert fresh_name("a", {"a", "a_1"}) == "a_2"

    @given(st.sets(st.sampled_from(["a", "a_1", "a_2", "a_3", "b"])))
    def test_never_in_use(self, used):
        assert fresh_name("a", used) not in used


class TestSortKey:
    @given(TERMS, TERMS)
    def test_total_and_consistent_with_equality(self, s, t):
        ks, kt = sort_key(s), sort_key(t)
        assert (ks == kt) == (s == t)
        assert ks < kt or kt < ks or ks == kt

    def test_names_of(self):
        assert names_of(("a", Var("x"), frozenset({"b"}))) == {"a", "b"}
