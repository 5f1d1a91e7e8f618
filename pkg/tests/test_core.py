import numpy as np
import pytest
from hypothesis import given, strategies as st

from lsinfer.core import (Alphabet, DevSequence, InputError, LSystem, TURTLE_ORDER, check_nesting,
                          derive_sequence, derive_step, format_lsystem, format_sequence, growth_matrix,
                          is_compatible, normalize, parikh, parse_lsystem, parse_sequence)

from conftest import golden


def test_derive_step_parallel_rewrite():
    ab = Alphabet(("A", "B"))
    sys_ = LSystem.from_rules(ab, "A", {"A": "AB", "B": "A"})
    assert derive_step(sys_, "ABA") == "ABAAB"


def test_derive_step_dragon():
    assert derive_step(golden("dragon"), "X") == "X+YF+"


def test_derive_step_unknown_symbol():
    sys_ = LSystem.from_rules(Alphabet(("A",)), "A", {"A": "AA"})
    with pytest.raises(InputError):
        derive_step(sys_, "AZ")


def test_derive_sequence_algae():
    sys_ = LSystem.from_rules(Alphabet(("A", "B")), "A", {"A": "AB", "B": "A"})
    assert derive_sequence(sys_, 3).words == ("A", "AB", "ABA", "ABAAB")


def test_derive_sequence_identity():
    sys_ = LSystem.from_rules(Alphabet(("A",), ("F",)), "AF", {})
    assert derive_sequence(sys_, 1).words == ("AF", "AF")


def test_parikh_and_growth():
    ab = Alphabet(("A", "B"))
    assert parikh("ABABBBABA", ab).tolist() == [4, 5]
    M = growth_matrix(golden("dragon"))
    alphabet = golden("dragon").alphabet
    assert alphabet.symbols == ("X", "Y", "+", "-", "F")
    assert M[0].tolist() == [1, 1, 2, 0, 1]
    assert M[2].tolist() == [0, 0, 1, 0, 0]


def test_parikh_unknown_symbol():
    with pytest.raises(InputError):
        parikh("AQ", Alphabet(("A",)))


def test_growth_relation_holds_on_golden_models():
    for name in ("dragon", "aphanocladia", "dipterosiphonia"):
        s = golden(name)
        rho = derive_sequence(s, 4)
        M = growth_matrix(s)
        for a, b in zip(rho.words, rho.words[1:]):
            assert np.array_equal(parikh(a, s.alphabet) @ M, parikh(b, s.alphabet))


def test_compatibility():
    sys_ = LSystem.from_rules(Alphabet(("A", "B")), "A", {"A": "AB", "B": "A"})
    assert is_compatible(sys_, ["A", "AB", "ABA"])
    assert not is_compatible(sys_, ["A", "AB", "ABB"])
    assert not is_compatible(sys_, ["Q", "Q"])


def test_alphabet_order_and_constants():
    a = Alphabet.from_words(["F+X[-Y]"])
    assert a.nonconstants == ("X", "Y")
    assert a.constants == ("[", "]", "+", "-", "F")
    assert a.symbols[: 2] == ("X", "Y")
    assert Alphabet.from_words(["AB+"], constants="").constants == ()
    with pytest.raises(InputError):
        Alphabet(("A", "A"))


def test_nesting():
    assert check_nesting("A[+B[-C]]D")
    assert not check_nesting("A]B[")
    assert not check_nesting("[[")
    assert check_nesting("")


def test_typographic_minus_is_normalized():
    assert normalize("A−B") == "A-B"
    rho = DevSequence.of(["A−", "AB−"])
    assert "-" in rho.alphabet.constants


def test_sequence_needs_two_nonempty_words():
    with pytest.raises(InputError):
        DevSequence.of(["A"])
    with pytest.raises(InputError):
        DevSequence(("A", ""))


def test_lsystem_text_round_trip():
    for name in ("dragon", "aphanocladia", "dipterosiphonia"):
        s = golden(name)
        again = parse_lsystem(format_lsystem(s))
        assert again == s


def test_parse_lsystem_errors():
    with pytest.raises(InputError):
        parse_lsystem("A -> B\n")
    with pytest.raises(InputError):
        parse_lsystem("axiom: A\nA -> B\nA -> C\n")
    with pytest.raises(InputError):
        parse_lsystem("axiom: A\nAB -> B\n")
    with pytest.raises(InputError):
        parse_lsystem("axiom: A\nthis is not a rule\n")
    with pytest.raises(InputError):
        parse_lsystem("axiom: A\nA -> \n")


def test_parse_lsystem_constants_line_and_comments():
    s = parse_lsystem("# comment\naxiom: A\nA -> AQ\nconstants: Q\n")
    assert s.alphabet.constants == ("Q",)
    assert s.succ("Q") == "Q"


def test_parse_sequence():
    words, consts = parse_sequence("constants: +F\nA\nA+F\n")
    assert words == ["A", "A+F"] and consts == "+F"
    assert format_sequence(words, consts) == "constants: +F\nA\nA+F\n"
    with pytest.raises(InputError):
        parse_sequence("A\n")
    with pytest.raises(InputError):
        parse_sequence("A\nA B\n")


def test_validity():
    ab = Alphabet(("A",), ("[", "]"))
    assert LSystem.from_rules(ab, "A", {"A": "A[A]"}).is_valid()
    assert not LSystem.from_rules(ab, "A", {"A": "A]["}).is_valid()


words_ab = st.text(alphabet="AB", min_size=1, max_size=8)


@given(st.tuples(words_ab, words_ab), words_ab)
def test_derivation_is_a_morphism(succ, w):
    sys_ = LSystem.from_rules(Alphabet(("A", "B")), w, {"A": succ[0], "B": succ[1]})
    u, v = w[: len(w) // 2], w[len(w) // 2:]
    assert derive_step(sys_, u + v) == derive_step(sys_, u) + derive_step(sys_, v)
    M = growth_matrix(sys_)
    assert np.array_equal(parikh(w, sys_.alphabet) @ M, parikh(derive_step(sys_, w), sys_.alphabet))


def test_turtle_order_is_fixed():
    assert TURTLE_ORDER.startswith("[]+-")
