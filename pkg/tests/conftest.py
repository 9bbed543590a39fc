from fractions import Fraction

from hypothesis import strategies as st

from conegreen.algebra import FactoredRationalW, ParamPoly, PolyW

small_rat = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@st.composite
def param_polys(draw, max_terms=3, max_deg=2):
    n = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(n):
        key = (draw(st.integers(0, max_deg)), draw(st.integers(0, max_deg)))
        terms[key] = draw(small_rat)
    return ParamPoly(terms)


@st.composite
def polys_w(draw, max_deg=2):
    return PolyW([draw(param_polys(max_terms=2, max_deg=1)) for _ in range(draw(st.integers(0, max_deg + 1)))])


@st.composite
def rational_ws(draw):
    num = draw(polys_w())
    roots = {Fraction(draw(st.integers(-4, 4))): draw(st.integers(1, 2)) for _ in range(draw(st.integers(0, 2)))}
    return FactoredRationalW(num, roots)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
