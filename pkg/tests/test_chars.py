import pytest

from shimtril.chars import DirichletChar, RootOfUnity, kronecker, unit_group_gens


def test_trivial_char():
    chi = DirichletChar.trivial(11)
    assert chi.order == 1 and chi.conductor == 1
    assert chi.is_even()
    assert chi.value_exponent(5) == 0


def test_quadratic_mod_5():
    # the quadratic character mod 5 is even with values matching kronecker
    gens = unit_group_gens(5)
    chi = DirichletChar(5, (gens[0][1] // 2,))
    assert chi.order == 2 and chi.conductor == 5
    assert chi.is_even()
    for a in range(1, 5):
        k = chi.value_exponent(a)
        val = 1 if k == 0 else -1
        assert val == kronecker(5, a) or val == kronecker(a, 5)


def test_conductor_of_lift():
    gens = unit_group_gens(5)
    chi5 = DirichletChar(5, (gens[0][1] // 2,))
    lifted = chi5.lift(50)
    assert lifted.conductor == 5
    assert lifted.order == 2
    assert lifted.conductor_exponent(5) == 1
    assert lifted.conductor_exponent(2) == 0


def test_products_and_conjugates():
    gens = unit_group_gens(13)
    chi = DirichletChar(13, (gens[0][1] // 6,))  # order 6
    assert chi.order == 6
    assert chi.times(chi.conjugate()).order == 1
    cube = chi.times(chi).times(chi)
    assert cube.order == 2
    assert chi.power(6).order == 1


def test_cross_modulus_product():
    gens3 = unit_group_gens(3)
    chi3 = DirichletChar(3, (1,))
    gens4 = unit_group_gens(4)
    chi4 = DirichletChar(4, (1,))
    prod = chi3.times(chi4)
    assert prod.modulus == 12
    assert prod.conductor == 12
    assert prod.is_even()  # chi3 and chi4 are both odd


def test_roots_of_unity():
    i = RootOfUnity(1, 4)
    assert (i * i) == RootOfUnity.minus_one()
    assert (i * i.inverse()).is_one
    assert RootOfUnity.minus_one().as_sign() == -1
    assert RootOfUnity(2, 6) == RootOfUnity(1, 3)
    assert RootOfUnity(1, 3).as_sign() is None
    z6 = RootOfUnity(1, 6)
    assert z6 * z6 * z6 == RootOfUnity.minus_one()


def test_kronecker_basics():
    assert kronecker(-4, 11) == -1
    assert kronecker(-4, 5) == 1
    assert kronecker(-3, 2) == -1
    assert kronecker(8, 7) == 1
    for p in (3, 5, 7, 11, 13):
        residues = {pow(a, 2, p) for a in range(1, p)}
        for a in range(1, p):
            assert kronecker(a, p) == (1 if a in residues else -1)
