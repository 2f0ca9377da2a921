"""Print order of the strata of every layer.

Mixtures printed on top of each other interfere, so the strata of a layer
are ordered against the strata of the layer below. Both layers are stacked
with the volume of every stratum used as its height, and a candidate order
is scored by summing over every pair of strata, one from each layer, the
distance between their mixtures divided by one plus the height separating
them in the stack. The first layer is ordered randomly and every following
layer takes the order with the highest score.

    class interface(stack):
        mixtures -- (m, K) array of the stacked mixtures from bottom to top
        heights -- height of every entry, normalized to a total of one
        boundaries -- cumulative heights starting at 0

Example usage:
    from strata import ordering
    job = ordering.order_layers(job, seed=0)
    print([item.plan.order for item in job.layers])
"""
import six
import numpy as np

from . import config,error,utils
Config = config.defaults
Log = Config.log.getChild(__name__[len(__package__)+1:])
__all__ = 'stack,stack_distance,ordering_score,order_layers,layer_score,strata'.split(',')

class stack(object):
    '''Ordered mixtures using their normalized volume as height'''
    def __init__(self, mixtures, volumes):
        self.mixtures = np.array(mixtures, dtype=float, ndmin=2)
        volumes = np.asarray(volumes, dtype=float).reshape(-1)
        if len(volumes) != len(self.mixtures):
            raise error.UserError(self, '__init__', message='Expected one volume per mixture : {:d} != {:d}'.format(len(volumes), len(self.mixtures)))
        if np.any(volumes < 0) or not np.all(np.isfinite(volumes)):
            raise error.UserError(self, '__init__', message='Volumes must be finite and non-negative : {!r}'.format(volumes.tolist()))
        total = volumes.sum()
        self.heights = volumes / total if total > 0 else np.zeros_like(volumes)
        self.boundaries = np.concatenate(([0.0], np.cumsum(self.heights)))

    def __len__(self):
        return len(self.mixtures)

    def shortname(self):
        return 'stack[{:d}]'.format(len(self))

    def __repr__(self):
        return '<{:s} heights={!r}>'.format(self.shortname(), self.heights.tolist())

def stack_distance(stack, a, b):
    '''Return the height between the top of entry ``a`` and the bottom of entry ``b`` of ``stack``'''
    if not 0 <= a < b < len(stack):
        raise error.UserError(stack, 'stack_distance', message='Entry {!r} does not precede entry {!r}'.format(a, b))
    return float(stack.boundaries[b] - stack.boundaries[a + 1])

def strata(plan, order=None):
    '''Return the (mixtures, volumes) of ``plan`` in print order'''
    order = plan.ordered() if order is None else tuple(order)
    if plan.per_stratum_volume is None or len(plan.per_stratum_volume) != plan.S or not np.all(np.isfinite(plan.per_stratum_volume)):
        raise error.PreconditionError(plan, 'strata', message='Plan has no volume for every stratum')
    index = list(order)
    return plan.base_mixtures[index], plan.per_stratum_volume[index]

def ordering_score(previous, candidate):
    """Return the score of printing ``candidate`` strata on top of ``previous`` strata.

    Both are (mixtures, volumes) pairs in print order.
    """
    mixtures = np.vstack((previous[0], candidate[0]))
    s = stack(mixtures, np.concatenate((previous[1], candidate[1])))
    m = len(previous[0])
    res = 0.0
    for j in six.moves.range(m):
        for i in six.moves.range(m, len(s)):
            res += np.linalg.norm(s.mixtures[j] - s.mixtures[i]) / (1.0 + stack_distance(s, j, i))
        continue
    return float(res)

def __scores(previous, mixtures, volumes, orders):
    '''Return the score of every row of ``orders`` applied to the ``mixtures`` and ``volumes`` of a layer'''
    total = previous[1].sum() + volumes.sum()
    scale = 1.0 / total if total > 0 else 0.0
    tops = np.cumsum(previous[1]) * scale
    bottoms = tops[-1] if len(tops) else 0.0
    heights = volumes[orders] * scale
    starts = bottoms + np.cumsum(heights, axis=1) - heights

    distance = np.linalg.norm(previous[0][:, None, :] - mixtures[None, :, :], axis=2)
    gaps = starts[:, None, :] - tops[None, :, None]
    return (distance[:, orders].transpose(1, 0, 2) / (1.0 + gaps)).sum(axis=(1, 2))

def best_order(previous, plan):
    '''Return the lexicographically first order of ``plan`` whose score is the highest, and the score'''
    orders = np.array(list(utils.permutations(plan.S)), dtype=int)
    scores = __scores(previous, plan.base_mixtures, plan.per_stratum_volume, orders)
    best = scores.max()
    index = int(np.flatnonzero(scores >= best - 1e-12)[0])
    return tuple(orders[index].tolist()), float(scores[index])

def order_layers(job, seed=None):
    '''Return ``job`` with the strata of every layer ordered bottom up'''
    seed = Config.ordering.seed if seed is None else seed
    rng = np.random.default_rng(seed)
    missing = [ item.index for item in job.layers if item.plan is None ]
    if missing:
        raise error.PreconditionError(job, 'order_layers', message='Layer(s) {!r} have no strata plan'.format(missing))

    layers,previous = [], None
    for item in job.layers:
        plan = item.plan
        if not plan.S:
            layers.append(item.copy(plan=plan.with_order(())))
            continue
        strata(plan, order=six.moves.range(plan.S))
        if previous is None:
            order = tuple(int(n) for n in rng.permutation(plan.S))
            Log.debug('order_layers : {:s} : Random order {!r}'.format(item.shortname(), order))
        else:
            order,score = best_order(previous, plan)
            Log.debug('order_layers : {:s} : Order {!r} with score {:.6g}'.format(item.shortname(), order, score))
        plan = plan.with_order(order)
        layers.append(item.copy(plan=plan))
        previous = strata(plan)
    Log.info('order_layers : Ordered {:d} layers with seed {!r}'.format(len(layers), seed))
    return job.copy(layers=layers)

def layer_score(job):
    '''Return the score of every layer against the layer printed below it, None for the first'''
    res,previous = [], None
    for item in job.layers:
        if item.plan is None or not item.plan.S:
            res.append(None)
            continue
        current = strata(item.plan)
        res.append(None if previous is None else ordering_score(previous, current))
        previous = current
    return res

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
    def test_ordering_stack_distance():
        s = stack([(1,0), (0,1), (1,0)], (0.5, 0.2, 0.3))
        if abs(stack_distance(s, 0, 2) - 0.2) < 1e-12 and stack_distance(s, 0, 1) == 0:
            raise Success

    @TestCase
    def test_ordering_identical_layers():
        layer = (np.array([(0.2, 0.8)]), np.array([1.0]))
        if ordering_score(layer, layer) == 0:
            raise Success

    results = []
    for t in TestCaseList:
        results.append( t() )
