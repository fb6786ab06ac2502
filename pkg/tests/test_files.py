import pytest

from gencontact.determining import paper_scope
from gencontact.files import (
    FormatError,
    format_generator,
    format_system,
    generator_from_block,
    read_generators,
    read_system,
    scan_blocks,
    system_from_block,
)

from .conftest import SAMPLES, P


def test_one_line_system_block():
    sys_ = read_system(SAMPLES / "case_I1.sys")
    assert sys_.indep == "x" and sys_.deps == ("y", "z") and sys_.order == 2
    assert sys_.rhs == (P("z'"), P("0"))


def test_system_with_functions_of_x():
    text = "system { indep: x  dep: y, z  eq: y'' = z'  eq: z'' = alpha(x)*y' + beta(x)*z' }"
    sys_ = system_from_block(scan_blocks(text)[0], paper_scope())
    assert sys_.rhs[1] == P("alpha*y' + beta*z'", paper_scope())


def test_D_notation_on_left_side():
    text = "system { indep: x dep: y, z eq: D(y,x,2) = z' eq: D(z,x,2) = 0 }"
    assert system_from_block(scan_blocks(text)[0]).order == 2


def test_comments_and_several_blocks():
    text = """
    # two fields
    generator A { xi: 1 }   # translation
    generator B {
      eta[y]: y   # scaling
      eta[z]: z
    }
    """
    blocks = scan_blocks(text)
    assert [b.name for b in blocks] == ["A", "B"]
    b = generator_from_block(blocks[1])
    assert b.etas == (P("y"), P("z")) and b.xi.is_zero()


def test_generator_round_trip():
    g = read_generators(SAMPLES / "X7.gen")[0]
    again = generator_from_block(scan_blocks(format_generator(g))[0])
    assert again == g


def test_system_round_trip():
    sys_ = read_system(SAMPLES / "reduced_linear.sys", paper_scope())
    again = system_from_block(scan_blocks(format_system(sys_))[0], paper_scope())
    assert again == sys_


def test_generator_directory():
    gens = read_generators(SAMPLES / "generators_I1")
    assert len(gens) == 15
    assert len({g.name for g in gens}) == 15


@pytest.mark.parametrize("text", [
    "generator X { xi: 1 ",
    "generator X { mu: 1 }",
    "generator X { xi: 1 + }",
    "generator X { xi: y' }",
    "junk",
    "generator X { stray xi: 1 }",
])
def test_malformed_generators(text):
    with pytest.raises(FormatError):
        for b in scan_blocks(text):
            generator_from_block(b)


@pytest.mark.parametrize("text", [
    "system { indep: x dep: y, z eq: y'' = z' }",
    "system { indep: x dep: y, z eq: y'' = z' eq: z''' = 0 }",
    "system { indep: x dep: y, z eq: y'' = z' eq: z'' = z'' }",
    "system { indep: x dep: y, z eq: y'' = z' eq: y'' = 0 }",
    "system { indep: x dep: y, z eq: y*2 = z' eq: z'' = 0 }",
    "system { dep: y, z eq: y'' = z' eq: z'' = 0 }",
])
def test_malformed_systems(text):
    with pytest.raises(FormatError):
        system_from_block(scan_blocks(text)[0])
