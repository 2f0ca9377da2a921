import numpy as np
import pytest

from strata import utils, error

def test_utils_fixed():
    assert utils.fixed(1.23456, 3) == '1.235'
    assert utils.fixed(-0.00001, 3) == '0.000'
    assert utils.fixed(2, 1) == '2.0'

@pytest.mark.parametrize('ratios', [(1/3., 1/3., 1/3.), (0.12345, 0.54321, 0.33334), (1.0, 0.0, 0.0), (0.2, 0.2, 0.2, 0.2, 0.2)])
def test_utils_quantize_sums_to_one(ratios):
    res = utils.quantize(ratios, 4)
    assert sum(int(round(r * 1e4)) for r in res) == 10000
    assert min(res) >= 0
    assert np.abs(np.array(res) - np.array(ratios) / sum(ratios)).max() <= 1e-4

def test_utils_quantize_empty():
    with pytest.raises(ValueError):
        utils.quantize((0.0, 0.0), 4)

def test_utils_binomial():
    assert utils.binomial(5, 2) == 10
    assert utils.binomial(3, 4) == 0
    assert utils.binomial(7, 0) == 1

def test_utils_permutations():
    assert list(utils.permutations(3))[:2] == [(0, 1, 2), (0, 2, 1)]
    assert len(list(utils.permutations(4))) == 24

def test_utils_cumulative():
    res = utils.cumulative([(0, 0), (3, 4), (3, 5)])
    assert res.tolist() == [0.0, 5.0, 6.0]

def test_utils_mapexception():
    @utils.mapexception({ZeroDivisionError: error.DegenerateError})
    def divide(a, b):
        return a / b
    assert divide(4, 2) == 2
    with pytest.raises(error.DegenerateError) as e:
        divide(1, 0)
    assert e.value.method == 'divide'
    assert isinstance(e.value.__cause__, ZeroDivisionError)
