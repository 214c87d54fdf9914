import sys

from hypothesis import settings, strategies as st

from uniterp.formula import Bottom, Conj, Disj, Impl, Top, Variable

settings.register_profile("ci", max_examples=60, deadline=None)
settings.load_profile("ci")
sys.setrecursionlimit(20000)


def naive_forces(m, w, f):
    """Forcing straight from the clauses, walking node lists; independent
    of the bitmask evaluator in the library."""
    if isinstance(f, Variable):
        return f.name in m.valuation[w]
    if isinstance(f, Bottom):
        return False
    if isinstance(f, Top):
        return True
    if isinstance(f, Conj):
        return naive_forces(m, w, f.left) and naive_forces(m, w, f.right)
    if isinstance(f, Disj):
        return naive_forces(m, w, f.left) or naive_forces(m, w, f.right)
    return all(not naive_forces(m, u, f.left) or naive_forces(m, u, f.right)
               for u in m.nodes if m.leq(w, u))


def formulas_st(vars=("p", "q"), max_leaves=12):
    leaves = st.sampled_from([Variable(v) for v in vars] + [Bottom(), Top()])
    return st.recursive(
        leaves,
        lambda kids: st.one_of(
            st.builds(Conj, kids, kids),
            st.builds(Disj, kids, kids),
            st.builds(Impl, kids, kids),
        ),
        max_leaves=max_leaves,
    )
