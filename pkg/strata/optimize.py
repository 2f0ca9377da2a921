"""Per-layer strata mixture optimization.

Every vertex of a layer carries a mixing ratio c. A layer is printed as S
strata of constant base mixtures L^1..L^S whose thickness varies along the
paths so that the average of the strata at each vertex reproduces c. The
thickness coefficients (alphas) of a vertex are the barycentric coordinates
of c with respect to the base mixtures.

The optimizer embeds the ratios into N = K-1 dimensions by dropping the last
component, finds the intrinsic dimension D of the embedded points with a
principal component analysis, and searches the smallest simplex built from
D+1 facets of their convex hull whose corners are valid mixtures. When no
such simplex exists the dimension is increased until N, and the unit
vectors of the filaments are used as a last resort.

    class interface(plan):
        S -- number of strata
        base_mixtures -- (S, K) array of the base mixture of every stratum
        order -- the print order of the strata, or None until ordered
        per_stratum_volume -- volume deposited by every stratum in mm^3
        alphas -- one (n, S) array of thickness coefficients per toolpath

        def apply(self, layer):
            '''Return the layer with the thickness coefficients attached'''

Example usage:
    from strata import optimize
    plan = optimize.optimize_layer(layer)
    layer = plan.apply(layer)
    print(plan.S, plan.base_mixtures)
"""
import math,time,itertools
import six
import numpy as np
from scipy.spatial import ConvexHull
try:
    from scipy.spatial import QhullError
except ImportError:
    from scipy.spatial.qhull import QhullError

from . import config,error,utils
from .field import normalize
Config = config.defaults
Log = Config.log.getChild(__name__[len(__package__)+1:])
__all__ = 'settings,pointset,basis,simplex,plan,embed,unembed,pca_reduce,hull_facets,min_enclosing_simplex,barycentric_coords,optimize_layer,fixed_plan,brute_force_min_simplex'.split(',')

# number of facet subsets evaluated at once
CHUNK = 4096

# point sets larger than this are bounded through the hull of a sample
HULL_POINTS = 128

class settings(object):
    '''Parameters of the optimizer, read from ``config.defaults.optimizer`` when not given'''
    parameters = ('epsilon', 'tolerance', 'residual_tol', 'singular_tol', 'enclosure_tol', 'max_candidates', 'shuffle_seed')

    def __init__(self, **attrs):
        res = set(attrs).difference(self.parameters)
        if res:
            raise error.UserError(self, '__init__', message='Invalid keyword(s) specified. Expected ({!r}) : {!r}'.format(self.parameters, tuple(sorted(res))))
        section = type(Config.optimizer).__properties__
        for name in self.parameters:
            value = attrs[name] if name in attrs else getattr(Config.optimizer, name)
            try:
                value = section[name].check(value)
            except ValueError as e:
                raise error.ValidationError(self, '__init__', message='Parameter {:s} : {!s}'.format(name, e))
            object.__setattr__(self, name, value)
        return

    def __setattr__(self, name, value):
        raise AttributeError('{:s} is immutable : {:s}'.format(type(self).__name__, name))

    @property
    def lambda_(self):
        return self.tolerance

    def items(self):
        return [ (name, getattr(self, name)) for name in self.parameters ]

    def shortname(self):
        return 'optimizer'

    def __repr__(self):
        return '<{:s} {:s}>'.format(type(self).__name__, ' '.join('{:s}={!r}'.format(k, v) for k, v in self.items()))

## barycentric embedding
def embed(c):
    '''Drop the last component of the mixing ratio(s) ``c``'''
    return np.asarray(c, dtype=float)[..., :-1]

def unembed(p):
    '''Append the component that completes the point(s) ``p`` to a sum of one'''
    p = np.asarray(p, dtype=float)
    return np.concatenate((p, 1.0 - p.sum(axis=-1, keepdims=True)), axis=-1)

class pointset(object):
    '''Embedded mixing ratios of the vertices of a layer'''
    def __init__(self, points, source_count=None):
        self.points = np.atleast_2d(np.asarray(points, dtype=float))
        self.source_count = len(self.points) if source_count is None else int(source_count)
        if len(self.points) and (self.points.min() < -1e-9 or self.points.sum(axis=1).max() > 1 + 1e-9):
            raise error.ValidationError(self, '__init__', message='Points are not embedded mixing ratios')

    @classmethod
    def from_mixes(cls, mixes):
        return cls(embed(mixes), source_count=len(mixes))

    @property
    def N(self):
        return self.points.shape[1]

    def __len__(self):
        return len(self.points)

    def shortname(self):
        return 'pointset[{:d}x{:d}]'.format(len(self.points), self.points.shape[1])

class basis(object):
    """Principal axes of an embedded point set.

    All N axes are kept in descending order of variance so that the
    dimension can be increased past D.
    """
    def __init__(self, mean, axes, variances, epsilon):
        self.mean,self.axes,self.variances = np.asarray(mean, dtype=float),np.asarray(axes, dtype=float),np.asarray(variances, dtype=float)
        self.epsilon = epsilon
        self.D = int(np.sum(self.variances > epsilon))

    @property
    def N(self):
        return len(self.mean)

    def project(self, points, d=None):
        '''Return the coordinates of the embedded ``points`` along the first ``d`` axes'''
        d = self.D if d is None else d
        return (np.asarray(points, dtype=float) - self.mean).dot(self.axes[:d].T)

    def lift(self, q, d=None):
        '''Return the embedded points at the coordinates ``q`` along the first ``d`` axes'''
        q = np.asarray(q, dtype=float)
        d = q.shape[-1] if d is None else d
        return self.mean + q.dot(self.axes[:d])

    def shortname(self):
        return 'basis(D={:d}, N={:d})'.format(self.D, self.N)

    def __repr__(self):
        return '<{:s} variances={!r}>'.format(self.shortname(), tuple(self.variances))

def pca_reduce(points, cfg=None):
    '''Return the principal axes of the embedded ``points`` with D the number of variances above epsilon'''
    cfg = settings() if cfg is None else cfg
    points = points.points if isinstance(points, pointset) else np.atleast_2d(np.asarray(points, dtype=float))
    if not len(points):
        raise error.UserError(None, 'pca_reduce', message='Unable to reduce an empty set of points')
    mean = points.mean(axis=0)
    centered = points - mean
    covariance = centered.T.dot(centered) / len(points)
    values,vectors = np.linalg.eigh(covariance)

    # descending variance, each axis pointing towards its largest component
    order = np.argsort(values)[::-1]
    values,axes = np.clip(values[order], 0.0, None),vectors[:, order].T
    signs = np.sign(axes[np.arange(len(axes)), np.argmax(np.abs(axes), axis=1)])
    axes *= np.where(signs == 0, 1.0, signs)[:, None]
    return basis(mean, axes, values, cfg.epsilon)

## convex hull
@utils.mapexception({QhullError: error.DegenerateError})
def __qhull(points):
    try:
        return ConvexHull(points)
    except QhullError:
        Log.debug('hull_facets : Retrying {:d} points with joggled input'.format(len(points)))
    return ConvexHull(points, qhull_options='QJ')

def __hull(points):
    '''Return the facets, the vertices and the area of every facet of the convex hull of ``points``'''
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or not len(points):
        raise error.DegenerateError(None, 'hull_facets', message='Expected a non-empty (n, D) array of points')
    D = points.shape[1]
    if D == 1:
        lo,hi = points[:, 0].min(), points[:, 0].max()
        if not hi > lo:
            raise error.DegenerateError(None, 'hull_facets', message='Points do not span an interval')
        return np.array([[-1.0, lo], [1.0, -hi]]), np.array([[lo], [hi]]), np.ones(2)

    unique = np.unique(np.round(points, 12), axis=0)
    if len(unique) <= D:
        raise error.DegenerateError(None, 'hull_facets', message='{:d} distinct points can not span {:d} dimensions'.format(len(unique), D))
    res = __qhull(unique)

    # area of every triangle from the gram determinant of its edges
    triangles = unique[res.simplices]
    edges = triangles[:, 1:] - triangles[:, :1]
    gram = np.linalg.det(np.einsum('fij,fkj->fik', edges, edges))
    areas = np.sqrt(np.clip(gram, 0.0, None)) / math.factorial(D - 1)

    # coplanar facets are reported once per triangle
    equations = res.equations / np.linalg.norm(res.equations[:, :-1], axis=1)[:, None]
    _,index,inverse = np.unique(np.round(equations, 9), axis=0, return_index=True, return_inverse=True)
    order = np.argsort(index)
    areas = np.bincount(inverse.ravel(), weights=areas, minlength=len(index))
    return equations[index[order]], unique[res.vertices], areas[order]

def hull(points):
    '''Return the facets and the vertices of the convex hull of ``points``'''
    facets,vertices,_ = __hull(points)
    return facets, vertices

def hull_facets(points):
    '''Return the outward hyperplanes (unit normal, offset) bounding the convex hull of ``points`` as rows'''
    facets,_ = hull(points)
    return facets

def __spread(points, count):
    '''Return the indices of ``count`` of ``points`` picked one at a time farthest from those already picked'''
    index = int(np.argmax(np.linalg.norm(points - points.mean(axis=0), axis=1)))
    res,distance = [index], np.linalg.norm(points - points[index], axis=1)
    while len(res) < count:
        index = int(np.argmax(distance))
        res.append(index)
        distance = np.minimum(distance, np.linalg.norm(points - points[index], axis=1))
    return np.array(res)

def __candidates(points):
    """Return the candidate facets, the points they must enclose and the facet areas.

    The hull of a large point set is replaced by the hull of a spread-out
    sample. Its facets only support the sample until they are pushed
    outwards over every point.
    """
    D = points.shape[1]
    points = np.unique(np.round(points, 12), axis=0)
    if D == 1 or len(points) <= HULL_POINTS:
        return __hull(points)
    facets,_,areas = __hull(points[__spread(points, HULL_POINTS)])
    return facets, points, areas

def __support(facets, points):
    '''Return ``facets`` with their offsets moved to touch the outermost of ``points``'''
    res = np.array(facets, dtype=float)
    res[:, -1] = -points.dot(res[:, :-1].T).max(axis=0)
    return res

def __reduced(F, D, cap):
    '''Return the largest number of facets whose (D+1)-subsets stay within ``cap``'''
    res = D + 1
    while res < F and utils.binomial(res + 1, D + 1) <= cap:
        res += 1
    return res

def __prominent(normals, areas, count):
    '''Return the indices of ``count`` facets favoring large facets that face away from those already picked'''
    index = int(np.argmax(areas))
    res,similarity = [index], normals.dot(normals[index])
    while len(res) < count:
        score = (1.0 - similarity) * areas
        score[res] = -np.inf
        index = int(np.argmax(score))
        res.append(index)
        similarity = np.maximum(similarity, normals.dot(normals[index]))
    return np.sort(res)

## simplices
class simplex(object):
    '''D+1 vertices in D dimensions'''
    def __init__(self, vertices, tested=0, facets=0):
        self.vertices = np.atleast_2d(np.asarray(vertices, dtype=float))
        D = self.vertices.shape[1]
        if self.vertices.shape != (D + 1, D):
            raise error.UserError(self, '__init__', message='A simplex in {:d} dimensions needs {:d} vertices : {!r}'.format(D, D + 1, self.vertices.shape))
        self.volume = volume(self.vertices[None])[0]
        self.tested,self.facets = tested,facets

    @property
    def D(self):
        return self.vertices.shape[1]

    def key(self):
        return tuple(sorted(map(tuple, np.round(self.vertices, 12))))

    def shortname(self):
        return 'simplex(D={:d})'.format(self.D)

    def __repr__(self):
        return '<{:s} volume={:.6g} vertices={!r}>'.format(self.shortname(), self.volume, self.vertices.tolist())

def volume(vertices):
    '''Return the volume of every simplex in the (n, D+1, D) array ``vertices``'''
    D = vertices.shape[-1]
    edges = vertices[:, 1:] - vertices[:, :1]
    return np.abs(np.linalg.det(edges)) / math.factorial(D)

@utils.mapexception({np.linalg.LinAlgError: error.DegenerateError})
def barycentric_coords(p, simplex):
    '''Return the coordinates of the point(s) ``p`` with respect to the vertices of ``simplex``'''
    vertices = simplex.vertices if hasattr(simplex, 'vertices') else np.asarray(simplex, dtype=float)
    if not volume(vertices[None])[0] > 0:
        raise error.DegenerateError(simplex, 'barycentric_coords', message='Simplex has no volume')
    p = np.asarray(p, dtype=float)
    points = np.atleast_2d(p)
    system = np.vstack((vertices.T, np.ones(len(vertices))))
    rhs = np.vstack((points.T, np.ones(len(points))))
    res = np.linalg.solve(system, rhs).T
    return res[0] if p.ndim == 1 else res

def __subsets(F, D, cfg):
    '''Yield arrays of (D+1)-subsets of F facets, drawing random subsets when they exceed the cap'''
    total = utils.binomial(F, D + 1)
    cap = cfg.max_candidates
    if cap is None or total <= cap:
        iterable = itertools.combinations(six.moves.range(F), D + 1)
    else:
        Log.warning('min_enclosing_simplex : Testing {:d} random facet subsets of {:d}'.format(cap, total))
        rng = np.random.default_rng(cfg.shuffle_seed)
        drawn = np.sort(np.argsort(rng.random((cap, F)), axis=1)[:, :D + 1], axis=1)
        drawn = np.unique(drawn, axis=0)
        iterable = map(tuple, drawn[rng.permutation(len(drawn))])
    while True:
        res = np.array(list(itertools.islice(iterable, CHUNK)), dtype=int)
        if not len(res):
            break
        yield res
    return

def __evaluate(normals, offsets, subsets, cfg, lift):
    '''Return the vertices and volumes of the bounded, well-conditioned and feasible simplices of ``subsets``'''
    D = normals.shape[1]
    A,rhs = normals[subsets], -offsets[subsets]

    # the facets bound a simplex when their cofactors share a sign
    rows = [ [j for j in six.moves.range(D + 1) if j != i] for i in six.moves.range(D + 1) ]
    minors = np.stack([(-1) ** i * np.linalg.det(A[:, rows[i]]) for i in six.moves.range(D + 1)], axis=1)
    bounded = (np.all(minors > 0, axis=1) | np.all(minors < 0, axis=1)) & np.all(np.abs(minors) >= cfg.singular_tol, axis=1)
    if not np.any(bounded):
        return np.zeros((0, D + 1, D)), np.zeros(0)
    A,rhs = A[bounded], rhs[bounded]

    # vertex i is where every facet but i meets
    vertices = np.stack([np.linalg.solve(A[:, rows[i]], rhs[:, rows[i]][..., None])[..., 0] for i in six.moves.range(D + 1)], axis=1)
    if lift is not None:
        mixes = lift(vertices.reshape(-1, D)).reshape(len(vertices), D + 1, -1)
        feasible = (mixes.min(axis=(1, 2)) >= -cfg.tolerance) & (np.abs(mixes.sum(axis=2) - 1.0).max(axis=1) <= cfg.tolerance)
        vertices = vertices[feasible]
    return vertices, volume(vertices)

def __lifter(lift):
    if lift is None or callable(lift):
        return lift
    return lambda q, basis=lift: unembed(basis.lift(q))

def min_enclosing_simplex(points, lift=None, cfg=None):
    """Return the smallest simplex enclosing ``points`` built from facets of their convex hull.

    Every (D+1)-subset of the hull facets is intersected. Subsets that are
    unbounded or near singular are rejected and so are simplices whose
    corners, mapped to mixing ratios through ``lift``, leave the valid
    mixtures by more than the tolerance. ``lift`` is a basis or a callable
    turning (n, D) points into (n, K) ratios. Returns None when no subset
    survives.

    When there are more subsets than ``max_candidates`` the hull is reduced
    to its most prominent facets first, or random subsets are drawn when a
    ``shuffle_seed`` is configured.
    """
    cfg = settings() if cfg is None else cfg
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] < 1:
        raise error.UserError(None, 'min_enclosing_simplex', message='Expected an (n, D) array of points with D >= 1')
    D = points.shape[1]
    facets,corners,areas = __candidates(points)
    F,cap = len(facets), cfg.max_candidates
    if cap is not None and cfg.shuffle_seed is None and utils.binomial(F, D + 1) > cap:
        keep = __prominent(facets[:, :-1], areas, __reduced(F, D, cap))
        Log.info('min_enclosing_simplex : Reducing {:d} facets to {:d} in {:d} dimensions'.format(F, len(keep), D))
        facets = facets[keep]
    if len(corners) > HULL_POINTS:
        facets = __support(facets, corners)
    normals,offsets = facets[:, :-1], facets[:, -1]
    lift = __lifter(lift)

    found,tested = [], 0
    for subsets in __subsets(len(facets), D, cfg):
        tested += len(subsets)
        vertices,volumes = __evaluate(normals, offsets, subsets, cfg, lift)
        found.extend(zip(volumes, vertices))

    # smallest volume that encloses the hull, ties broken by the sorted vertices
    found.sort(key=lambda item: item[0])
    best = None
    for size, vertices in found:
        if best is not None and size > best.volume * (1 + 1e-12) + 1e-15:
            break
        if not size > 0:
            continue
        res = simplex(vertices, tested=tested, facets=F)
        if barycentric_coords(corners, res).min() < -cfg.enclosure_tol:
            continue
        if best is None or res.key() < best.key():
            best = res
        continue
    Log.debug('min_enclosing_simplex : Tested {:d} subsets of {:d} facets in {:d} dimensions : {!r}'.format(tested, F, D, best))
    if best is None:
        return None
    best.tested = tested
    return best

## plans
class plan(object):
    """The strata of one layer.

    ``stats`` records how the plan was found: elapsed time in seconds, the
    final dimension, the number of hull facets, the facet subsets tested,
    the fallback taken and the largest conservation residual before and
    after clamping.
    """
    def __init__(self, base_mixtures, alphas, per_stratum_volume, order=None, stats=None):
        self.base_mixtures = np.array(base_mixtures, dtype=float, ndmin=2)
        self.alphas = tuple(alphas)
        self.per_stratum_volume = np.asarray(per_stratum_volume, dtype=float)
        self.order = None if order is None else tuple(int(n) for n in order)
        self.stats = dict(stats or {})
        if self.order is not None and sorted(self.order) != list(six.moves.range(self.S)):
            raise error.UserError(self, '__init__', message='Order {!r} is not a permutation of {:d} strata'.format(self.order, self.S))

    @property
    def S(self):
        return len(self.base_mixtures)

    @property
    def K(self):
        return self.base_mixtures.shape[1]

    @property
    def fallback(self):
        return self.stats.get('fallback')

    def ordered(self):
        '''Return the stratum indices in print order'''
        if self.order is None:
            raise error.PreconditionError(self, 'ordered', message='Strata have not been ordered')
        return self.order

    def with_order(self, order):
        return plan(self.base_mixtures, self.alphas, self.per_stratum_volume, order=order, stats=self.stats)

    def apply(self, layer):
        '''Return ``layer`` with the thickness coefficients of every path and this plan attached'''
        if len(self.alphas) != len(layer.toolpaths):
            raise error.PreconditionError(self, 'apply', message='Plan has {:d} paths but {:s} has {:d}'.format(len(self.alphas), layer.shortname(), len(layer.toolpaths)))
        paths = [ item.copy(alphas=alphas) for item, alphas in zip(layer.toolpaths, self.alphas) ]
        return layer.copy(toolpaths=paths, plan=self)

    def serialize(self):
        res = {'S': self.S, 'base_mixtures': self.base_mixtures.tolist(), 'order': None if self.order is None else list(self.order), 'per_stratum_volume': self.per_stratum_volume.tolist()}
        res.update(self.stats)
        return res

    def shortname(self):
        return 'plan(S={:d})'.format(self.S)

    def __repr__(self):
        return '<{:s} order={!r} fallback={!r}>'.format(self.shortname(), self.order, self.fallback)

def __volumes(layer, alphas):
    S = alphas[0].shape[1] if alphas else 0
    res = np.zeros(S)
    for item, values in zip(layer.toolpaths, alphas):
        res += item.copy(alphas=values).volumes(layer.thickness).sum(axis=0)
    return res

def __split(layer, values):
    res,start = [], 0
    for item in layer.toolpaths:
        res.append(values[start:start + len(item)])
        start += len(item)
    return res

def __plan(layer, base, alphas, stats):
    alphas = __split(layer, alphas)
    stats['elapsed'] = time.time() - stats.pop('started')
    res = plan(base, alphas, __volumes(layer, alphas), stats=stats)
    Log.debug('optimize_layer : {:s} : {!r} in {:.3f}s'.format(layer.shortname(), res, stats['elapsed']))
    return res

def __resolve(base, mixes):
    '''Return the thickness coefficients of ``mixes`` in terms of the clamped ``base`` mixtures'''
    S = len(base)
    system = np.vstack((base.T, np.ones((1, S))))
    rhs = np.vstack((mixes.T, np.ones((1, len(mixes)))))
    res,_,_,_ = np.linalg.lstsq(system, rhs, rcond=None)
    return normalize(np.clip(res.T, 0.0, 1.0))

def __strata(found, axes, q, mixes):
    '''Return the clamped base mixtures of ``found``, the alphas of ``mixes`` and the residuals before and after clamping'''
    raw = unembed(axes.lift(found.vertices, found.D))
    before = barycentric_coords(q, found)
    base = normalize(raw)
    alphas = __resolve(base, mixes)
    return base, alphas, float(np.abs(before.dot(raw) - mixes).max()), float(np.abs(alphas.dot(base) - mixes).max())

def optimize_layer(layer, cfg=None):
    """Return the strata plan of ``layer``.

    A layer with a single mixture gets one stratum of the mean mixture.
    Otherwise the smallest feasible enclosing simplex is searched at the
    intrinsic dimension of the mixtures and above. Its corners are clamped
    to valid mixtures and the alphas are solved against them. A dimension
    is rejected when the strata miss a mixture by more than twice the
    tolerance before clamping or by more than ``residual_tol`` after. When
    no dimension succeeds, the strata are the filaments themselves.
    """
    cfg = settings() if cfg is None else cfg
    if not layer.resampled():
        raise error.PreconditionError(layer, 'optimize_layer', message='Layer has not been resampled against a field')
    stats = {'started': time.time(), 'dimension': 0, 'facets': 0, 'tested': 0, 'residual_pre': 0.0, 'residual_post': 0.0}
    if not layer.vertex_count():
        stats['fallback'] = 'empty'
        return __plan(layer, np.zeros((0, 0)), np.zeros((0, 0)), stats)

    mixes = layer.mixes()
    K = mixes.shape[1]
    points = pointset.from_mixes(mixes)
    axes = pca_reduce(points, cfg)

    start = axes.D
    if start == 0:
        mean = normalize(mixes.mean(axis=0))
        residual = float(np.abs(mixes - mean).max())
        if residual <= cfg.residual_tol:
            stats.update(fallback='constant', residual_pre=residual, residual_post=residual)
            return __plan(layer, mean[None], np.ones((len(mixes), 1)), stats)
        Log.info('optimize_layer : {:s} : Mean mixture misses the mixtures by {:.4f}'.format(layer.shortname(), residual))
        start = 1

    for d in six.moves.range(start, K):
        q = axes.project(points.points, d)
        try:
            found = min_enclosing_simplex(q, lift=lambda v, d=d: unembed(axes.lift(v, d)), cfg=cfg)
        except error.DegenerateError as e:
            Log.info('optimize_layer : {:s} : Points do not span {:d} dimensions : {!s}'.format(layer.shortname(), d, e))
            continue
        if found is None:
            Log.info('optimize_layer : {:s} : No feasible simplex in {:d} dimensions'.format(layer.shortname(), d))
            continue
        base,alphas,pre,post = __strata(found, axes, q, mixes)
        if pre <= 2 * cfg.tolerance and post <= cfg.residual_tol:
            stats.update(fallback='simplex', dimension=found.D, facets=found.facets, tested=found.tested, residual_pre=pre, residual_post=post)
            return __plan(layer, base, alphas, stats)
        Log.info('optimize_layer : {:s} : Strata in {:d} dimensions miss the mixtures by {:.4f} before and {:.4f} after clamping'.format(layer.shortname(), d, pre, post))
        continue

    Log.warning('optimize_layer : {:s} : Falling back to the {:d} filaments as strata'.format(layer.shortname(), K))
    stats.update(fallback='unit', dimension=K - 1)
    return __plan(layer, np.eye(K), mixes, stats)

def fixed_plan(layer, K=None):
    '''Return the unoptimized plan of ``layer`` with one stratum per filament printed in filament order'''
    if not layer.resampled():
        raise error.PreconditionError(layer, 'fixed_plan', message='Layer has not been resampled against a field')
    stats = {'started': time.time(), 'dimension': 0, 'facets': 0, 'tested': 0, 'residual_pre': 0.0, 'residual_post': 0.0, 'fallback': 'fixed'}
    if not layer.vertex_count():
        stats['fallback'] = 'empty'
        return __plan(layer, np.zeros((0, 0)), np.zeros((0, 0)), stats).with_order(())
    mixes = layer.mixes()
    K = mixes.shape[1] if K is None else K
    res = __plan(layer, np.eye(K), mixes, stats)
    return res.with_order(six.moves.range(K))

## test oracle
def __wrap(points):
    '''Return the corners of the convex hull of 2d ``points`` counter-clockwise by gift wrapping'''
    start = min(six.moves.range(len(points)), key=lambda i: (points[i][0], points[i][1]))
    res,current = [], start
    while True:
        res.append(current)
        candidate = (current + 1) % len(points)
        for index in six.moves.range(len(points)):
            a = points[candidate] - points[current]
            b = points[index] - points[current]
            cross = a[0] * b[1] - a[1] * b[0]
            # take the farthest of collinear points to skip the middle ones
            if cross < 0 or (cross == 0 and b.dot(b) > a.dot(a)):
                candidate = index
            continue
        current = candidate
        if current == start or len(res) > len(points):
            break
    return res

def brute_force_min_simplex(points, feasible=None):
    """Return the smallest simplex over every subset of hull edges, or None.

    Only intended for checking ``min_enclosing_simplex``. Accepts at most 60
    points in 1 or 2 dimensions. ``feasible`` optionally rejects a candidate
    given its (D+1, D) vertices.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    D = points.shape[1]
    if D > 2 or len(points) > 60:
        raise error.UserError(None, 'brute_force_min_simplex', message='Refusing {:d} points in {:d} dimensions'.format(len(points), D))

    if D == 1:
        res = np.array([[points.min()], [points.max()]])
        if not res[1, 0] > res[0, 0] or (feasible is not None and not feasible(res)):
            return None
        return simplex(res)

    corners = [ points[i] for i in __wrap(points) ]
    edges = [ (corners[i], corners[(i + 1) % len(corners)]) for i in six.moves.range(len(corners)) ]
    best = None
    for lines in itertools.combinations(edges, 3):
        vertices = []
        for (p, q), (r, s) in itertools.combinations(lines, 2):
            u,v = q - p, s - r
            det = u[0] * v[1] - u[1] * v[0]
            if abs(det) < 1e-12:
                break
            t = ((r[0] - p[0]) * v[1] - (r[1] - p[1]) * v[0]) / det
            vertices.append(p + t * u)
        if len(vertices) != 3:
            continue
        a,b,c = vertices
        area = abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])) / 2.0
        if not area > 0:
            continue

        # every point must lie on the inner side of every edge of the triangle
        orientation = np.sign((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
        inside = True
        for e0, e1 in ((a, b), (b, c), (c, a)):
            cross = (e1[0] - e0[0]) * (points[:, 1] - e0[1]) - (e1[1] - e0[1]) * (points[:, 0] - e0[0])
            scale = math.hypot(*(e1 - e0))
            if np.any(orientation * cross / scale < -1e-9):
                inside = False
                break
            continue
        if not inside:
            continue
        res = np.array(vertices)
        if feasible is not None and not feasible(res):
            continue
        if best is None or area < best[0]:
            best = area, res
        continue
    return None if best is None else simplex(best[1])

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
    def test_optimize_standard_triangle():
        points = embed(np.array([(1,0,0), (0,1,0), (0,0,1), (0.2,0.3,0.5)]))
        res = min_enclosing_simplex(points, lift=unembed)
        if res is not None and abs(res.volume - 0.5) < 1e-12:
            raise Success

    @TestCase
    def test_optimize_centroid():
        res = barycentric_coords((1/3., 1/3.), np.array([(0,0), (1,0), (0,1)], dtype=float))
        if np.allclose(res, (1/3., 1/3., 1/3.)):
            raise Success

    results = []
    for t in TestCaseList:
        results.append( t() )
