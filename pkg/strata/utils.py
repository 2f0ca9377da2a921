import math
import itertools,functools
import six
import numpy as np

def fixed(value, places):
    """Return ``value`` as a fixed-point string with ``places`` decimals.

    The result never depends on the locale and never contains an exponent or
    a negative zero.
    """
    res = '{:.{:d}f}'.format(float(value), places)
    if res.startswith('-') and not res.strip('-0.'):
        return res[1:]
    return res

def quantize(ratios, places):
    """Round the barycentric vector ``ratios`` to ``places`` decimals.

    Rounding is done by largest remainder so that the rounded components
    still sum to exactly one. Returns a tuple of floats.
    """
    scale = 10 ** places
    values = np.clip(np.asarray(ratios, dtype=float), 0.0, None)
    total = values.sum()
    if total <= 0:
        raise ValueError('Unable to quantize a vector with no positive component : {!r}'.format(ratios))
    scaled = values * (scale / total)
    units = np.floor(scaled).astype(np.int64)
    leftover = int(scale - units.sum())
    # order by descending remainder, ties go to the lower index
    for index in sorted(range(len(units)), key=lambda i: (-(scaled[i] - units[i]), i))[:leftover]:
        units[index] += 1
    return tuple(float(fixed(u / scale, places)) for u in units)

## exception remapping
def mapexception(map={}, any=None, ignored=()):
    """Decorator for a function that maps exceptions from one type into another.

    /map/ is a dictionary describing how to map exceptions.
        Each key can be a Source or a tuple of Sources, and any instance of
        a Source will be replaced by Destination(exception, function-name, message)
    /any/ describes the exception to raise if any exception is raised.
        use None to pass the original exception through
    /ignored/ will allow exceptions of these types to fall through

    """
    assert isinstance(map, dict), 'exception /map/ expected to be of a dictionary type'
    assert hasattr(ignored, '__contains__'), '/ignored/ is expected to be a list of exceptions'
    if any is not None:
        assert issubclass(any,BaseException), '/any/ expected to be a solitary exception'

    def decorator(fn):
        @functools.wraps(fn)
        def decorated(*args, **kwds):
            try:
                return fn(*args, **kwds)
            except Exception as v:
                if isinstance(v, tuple(ignored)):
                    raise
                for src,dst in map.items():
                    if isinstance(v, src):
                        six.raise_from(dst(v, fn.__name__, str(v)), v)
                    continue
                if any is None:
                    raise
                six.raise_from(any(v, fn.__name__, str(v)), v)
        return decorated
    return decorator

## geometry along polylines
def cumulative(points):
    """Return the cumulative xy length at every vertex of the polyline ``points``"""
    points = np.asarray(points, dtype=float)
    if len(points) < 2:
        return np.zeros(len(points))
    lengths = np.hypot(*np.diff(points[:, :2], axis=0).T)
    return np.concatenate(([0.0], np.cumsum(lengths)))

def binomial(n, k):
    """Return the number of ways to choose ``k`` items out of ``n``"""
    if not 0 <= k <= n:
        return 0
    return math.factorial(n) // (math.factorial(k) * math.factorial(n - k))

def permutations(count):
    """Yield every permutation of ``range(count)`` in lexicographic order"""
    return itertools.permutations(six.moves.range(count))

if __name__ == '__main__':
    class Result(Exception): pass
    class Success(Result): pass
    class Failure(Result): pass

    TestCaseList = []
    def TestCase(fn):
        def harness(**kwds):
            name = fn.__name__
            try:
                res = fn(**kwds)
                raise Failure
            except Success as e:
                print('%s: %r'% (name,e))
                return True
            except Failure as e:
                print('%s: %r'% (name,e))
            except Exception as e:
                print('%s: %r : %r'% (name,Failure(), e))
            return False
        TestCaseList.append(harness)
        return fn

if __name__ == '__main__':
    @TestCase
    def test_quantize_thirds():
        res = quantize((1/3., 1/3., 1/3.), 4)
        if res == (0.3334, 0.3333, 0.3333):
            raise Success
        print(res)

    @TestCase
    def test_fixed_negative_zero():
        if fixed(-0.00001, 3) == '0.000':
            raise Success

    results = []
    for t in TestCaseList:
        results.append( t() )
