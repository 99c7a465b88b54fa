import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from forcinglab import zoo


@pytest.fixture(scope="session")
def cohen11():
    return zoo.cohen(1, 1)


@pytest.fixture(scope="session")
def cohen12():
    return zoo.cohen(1, 2)


@pytest.fixture(scope="session")
def dyadic2():
    return zoo.dyadic_random(2)


@pytest.fixture(scope="session")
def amoeba2():
    return zoo.amoeba(2, Fraction(1, 4))


@pytest.fixture(scope="session")
def collapse22():
    return zoo.collapse(2, 2)


@pytest.fixture(scope="session")
def mathias6():
    return zoo.mathias(6)


@pytest.fixture(scope="session")
def marker3():
    return zoo.marker(3)


@pytest.fixture(scope="session")
def marker4():
    return zoo.marker(4)


@pytest.fixture(scope="session")
def small_corpus():
    from helpers import small_posets_with_top

    return small_posets_with_top(5)


@pytest.fixture(scope="session")
def corpus_formulas():
    from helpers import formula_corpus

    return formula_corpus()


@pytest.fixture(scope="session")
def corpus_posets(small_corpus, cohen12, dyadic2, amoeba2, collapse22, mathias6, marker3):

    return list(small_corpus) + [
        cohen12[0],
        dyadic2,
        amoeba2,
        collapse22[0],
        mathias6,
        marker3[0],
    ]
