"""System definition files."""

import pytest

from stackel import MomentumPolynomial, ParseError, UsageError, load_system, loads_system
from stackel.catalog import EXAMPLES, example_text, load_example

SMALL = """
# oscillator with a rotation symmetry
[system]
name = rotor
coordinates = x1, x2
parameters = a

[potential]
V = a*(x1^2 + x2^2)

[symmetries]
L = x1*p2 - x2*p1
L2 = L^2

[relations]
HL = {H, L} = 0
"""


def test_small_file():
    sf = loads_system(SMALL)
    assert sf.name == "rotor" and not sf.quantum
    assert sf.hamiltonian == sf.parse("p1^2 + p2^2 + a*(x1^2 + x2^2)")
    assert sf.symmetries["L2"] == sf.symmetries["L"] ** 2
    assert [r.name for r in sf.relations] == ["HL"]


def test_metric_section():
    text = SMALL.replace("[potential]", "[metric]\ng11 = 1/x1\ng22 = 1/x1\n\n[potential]")
    sf = loads_system(text)
    assert sf.hamiltonian == sf.parse("(p1^2 + p2^2)/x1 + a*(x1^2 + x2^2)")


@pytest.mark.parametrize("text, fragment", [
    ("[system]\nmode = relativistic\n", "mode"),
    ("[sistem]\nname = x\n", "unknown section"),
    ("[potential]\nV = 1\n", "missing [system]"),
    ("[system]\nparameters = a\n[potential]\nV = a*q\n", "unknown identifier"),
    ("[system]\n[relations]\nR = H\n", "left = right"),
])
def test_malformed_files(text, fragment):
    with pytest.raises(ParseError) as info:
        loads_system(text)
    assert fragment in str(info.value)


def test_missing_file(tmp_path):
    with pytest.raises(UsageError):
        load_system(tmp_path / "nope.sys")


def test_disk_round_trip(tmp_path):
    p = tmp_path / "rotor.sys"
    p.write_text(SMALL, encoding="utf-8")
    assert load_system(p).hamiltonian == loads_system(SMALL).hamiltonian


@pytest.mark.parametrize("n", EXAMPLES)
def test_catalog_files_parse(n):
    sf = load_example(n)
    assert sf.name.startswith(f"Example {n}")
    assert sf.symmetries
    assert example_text(n).lstrip().startswith("#")
    kind = MomentumPolynomial if not sf.quantum else type(sf.hamiltonian)
    assert isinstance(sf.hamiltonian, kind)


def test_alpha_family_shift(example):
    """K(alpha) replaces each family parameter q by q + alpha*v_q."""
    sf = example(5)
    Ka = sf.alpha_family(sf.symmetries["K2"])
    assert "alpha" in Ka.free_symbols()
    assert Ka.subs({"alpha": 0}) == sf.symmetries["K2"].lift(Ka.field)
