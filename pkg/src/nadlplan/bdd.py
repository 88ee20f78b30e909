"""Reduced ordered binary decision diagrams.

Nodes live in a single shared table per manager. Internally a node is an
``int`` index into three parallel lists (variable, low, high); the
terminals are 0 and 1. The public API hands out :class:`NodeRef` values,
which pair an index with its owning manager so that diagrams from
different managers cannot be mixed by accident.

The variable order is fixed when the manager is created: variable index
``i`` sits at level ``i``.
"""
from __future__ import annotations

import sys
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

ZERO_ID = 0
ONE_ID = 1

AND = 'and'
OR = 'or'
XOR = 'xor'
IMPLIES = 'implies'
IFF = 'iff'
DIFF = 'diff'
OPERATORS = (AND, OR, XOR, IMPLIES, IFF, DIFF)

# recursion depth is bounded by a small multiple of the variable count
if sys.getrecursionlimit() < 10000:
    sys.setrecursionlimit(10000)


class BddError(Exception):
    """Raised on misuse of a manager or its nodes."""


class _NoCache(dict):
    """Drop-in cache that never remembers anything."""

    def __setitem__(self, key, value):
        pass


class NodeRef:
    """Handle to a node of a :class:`BddManager`.

    Two handles are equal iff they belong to the same manager and denote the
    same node, which by canonicity means the same boolean function.
    """

    __slots__ = ('manager', 'id')

    def __init__(self, manager: 'BddManager', node_id: int):
        self.manager = manager
        self.id = node_id

    def __eq__(self, other):
        return (isinstance(other, NodeRef) and self.manager is other.manager
                and self.id == other.id)

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return hash((id(self.manager), self.id))

    def __repr__(self):
        if self.id == ZERO_ID:
            return 'NodeRef(ZERO)'
        if self.id == ONE_ID:
            return 'NodeRef(ONE)'
        return f'NodeRef({self.id}, var={self.manager._var[self.id]})'

    def __and__(self, other):
        return self.manager.apply(AND, self, other)

    def __or__(self, other):
        return self.manager.apply(OR, self, other)

    def __xor__(self, other):
        return self.manager.apply(XOR, self, other)

    def __invert__(self):
        return self.manager.negate(self)

    def __sub__(self, other):
        return self.manager.apply(DIFF, self, other)

    def implies(self, other):
        return self.manager.apply(IMPLIES, self, other)

    def iff(self, other):
        return self.manager.apply(IFF, self, other)

    @property
    def is_zero(self) -> bool:
        return self.id == ZERO_ID

    @property
    def is_one(self) -> bool:
        return self.id == ONE_ID

    @property
    def var(self) -> Optional[int]:
        """Decision variable at the root, ``None`` for terminals."""
        if self.id <= ONE_ID:
            return None
        return self.manager._var[self.id]

    @property
    def low(self) -> 'NodeRef':
        return NodeRef(self.manager, self.manager._lo[self.id])

    @property
    def high(self) -> 'NodeRef':
        return NodeRef(self.manager, self.manager._hi[self.id])


class BddManager:
    """Shared store of reduced ordered decision diagrams.

    Parameters
    ----------
    num_vars:
        Number of decision variables. Variable ``i`` is at position ``i``
        of the order.
    names:
        Optional display names, used by :meth:`to_dot`.
    cache:
        Memoize operations. Disabling it changes only speed, never results.
    cache_limit:
        Operation caches are cleared once their combined size exceeds this.
    """

    def __init__(self, num_vars: int, names: Optional[Sequence[str]] = None,
                 cache: bool = True, cache_limit: int = 4_000_000):
        if num_vars < 0:
            raise BddError('variable count must be non-negative')
        self.num_vars = num_vars
        if names is not None and len(names) != num_vars:
            raise BddError('need exactly one name per variable')
        self.names = list(names) if names is not None else [f'v{i}' for i in range(num_vars)]
        # terminals sit below every variable
        self._var: List[int] = [num_vars, num_vars]
        self._lo: List[int] = [ZERO_ID, ONE_ID]
        self._hi: List[int] = [ZERO_ID, ONE_ID]
        self._unique: Dict[Tuple[int, int, int], int] = {}
        self.cache_enabled = cache
        self.cache_limit = cache_limit
        self._new_cache = dict if cache else _NoCache
        self._caches: List[dict] = []
        self._and_cache = self._register_cache()
        self._or_cache = self._register_cache()
        self._xor_cache = self._register_cache()
        self._not_cache = self._register_cache()
        self._exists_cache = self._register_cache()
        self._relprod_cache = self._register_cache()
        self._rename_cache = self._register_cache()
        self._restrict_cache = self._register_cache()
        self._varsets: Dict[frozenset, int] = {}
        self.ZERO = NodeRef(self, ZERO_ID)
        self.ONE = NodeRef(self, ONE_ID)

    def _register_cache(self) -> dict:
        c = self._new_cache()
        self._caches.append(c)
        return c

    def clear_caches(self) -> None:
        for c in self._caches:
            c.clear()

    def _maybe_trim(self) -> None:
        if sum(len(c) for c in self._caches) > self.cache_limit:
            self.clear_caches()

    def __len__(self):
        """Number of internal nodes ever created."""
        return len(self._var) - 2

    # ------------------------------------------------------------------
    # node construction

    def _mk(self, v: int, lo: int, hi: int) -> int:
        if lo == hi:
            return lo
        key = (v, lo, hi)
        u = self._unique.get(key)
        if u is None:
            u = len(self._var)
            self._var.append(v)
            self._lo.append(lo)
            self._hi.append(hi)
            self._unique[key] = u
        return u

    def _wrap(self, u: int) -> NodeRef:
        return NodeRef(self, u)

    def _unwrap(self, f: NodeRef) -> int:
        if not isinstance(f, NodeRef):
            raise BddError(f'expected a NodeRef, got {type(f).__name__}')
        if f.manager is not self:
            raise BddError('node belongs to a different manager')
        return f.id

    def _check_var(self, v: int) -> None:
        if not isinstance(v, int) or not 0 <= v < self.num_vars:
            raise BddError(f'variable index {v!r} out of range 0..{self.num_vars - 1}')

    def make_var(self, v: int) -> NodeRef:
        """The function that is true iff variable ``v`` is true."""
        self._check_var(v)
        return self._wrap(self._mk(v, ZERO_ID, ONE_ID))

    def make_nvar(self, v: int) -> NodeRef:
        self._check_var(v)
        return self._wrap(self._mk(v, ONE_ID, ZERO_ID))

    def constant(self, value: bool) -> NodeRef:
        return self.ONE if value else self.ZERO

    def cube(self, assignment: Mapping[int, bool]) -> NodeRef:
        """Conjunction of literals, one per assigned variable."""
        u = ONE_ID
        for v in sorted(assignment, reverse=True):
            self._check_var(v)
            if assignment[v]:
                u = self._mk(v, ZERO_ID, u)
            else:
                u = self._mk(v, u, ZERO_ID)
        return self._wrap(u)

    # ------------------------------------------------------------------
    # boolean connectives

    def _and(self, u: int, v: int) -> int:
        if u == v:
            return u
        if u == ZERO_ID or v == ZERO_ID:
            return ZERO_ID
        if u == ONE_ID:
            return v
        if v == ONE_ID:
            return u
        if u > v:
            u, v = v, u
        key = (u, v)
        cache = self._and_cache
        r = cache.get(key)
        if r is not None:
            return r
        var = self._var
        a, b = var[u], var[v]
        if a == b:
            r = self._mk(a, self._and(self._lo[u], self._lo[v]),
                         self._and(self._hi[u], self._hi[v]))
        elif a < b:
            r = self._mk(a, self._and(self._lo[u], v), self._and(self._hi[u], v))
        else:
            r = self._mk(b, self._and(u, self._lo[v]), self._and(u, self._hi[v]))
        cache[key] = r
        return r

    def _or(self, u: int, v: int) -> int:
        if u == v:
            return u
        if u == ONE_ID or v == ONE_ID:
            return ONE_ID
        if u == ZERO_ID:
            return v
        if v == ZERO_ID:
            return u
        if u > v:
            u, v = v, u
        key = (u, v)
        cache = self._or_cache
        r = cache.get(key)
        if r is not None:
            return r
        var = self._var
        a, b = var[u], var[v]
        if a == b:
            r = self._mk(a, self._or(self._lo[u], self._lo[v]),
                         self._or(self._hi[u], self._hi[v]))
        elif a < b:
            r = self._mk(a, self._or(self._lo[u], v), self._or(self._hi[u], v))
        else:
            r = self._mk(b, self._or(u, self._lo[v]), self._or(u, self._hi[v]))
        cache[key] = r
        return r

    def _xor(self, u: int, v: int) -> int:
        if u == v:
            return ZERO_ID
        if u == ZERO_ID:
            return v
        if v == ZERO_ID:
            return u
        if u == ONE_ID:
            return self._not(v)
        if v == ONE_ID:
            return self._not(u)
        if u > v:
            u, v = v, u
        key = (u, v)
        cache = self._xor_cache
        r = cache.get(key)
        if r is not None:
            return r
        var = self._var
        a, b = var[u], var[v]
        if a == b:
            r = self._mk(a, self._xor(self._lo[u], self._lo[v]),
                         self._xor(self._hi[u], self._hi[v]))
        elif a < b:
            r = self._mk(a, self._xor(self._lo[u], v), self._xor(self._hi[u], v))
        else:
            r = self._mk(b, self._xor(u, self._lo[v]), self._xor(u, self._hi[v]))
        cache[key] = r
        return r

    def _not(self, u: int) -> int:
        if u <= ONE_ID:
            return 1 - u
        cache = self._not_cache
        r = cache.get(u)
        if r is not None:
            return r
        r = self._mk(self._var[u], self._not(self._lo[u]), self._not(self._hi[u]))
        cache[u] = r
        return r

    def _apply_ids(self, op: str, u: int, v: int) -> int:
        if op == AND:
            return self._and(u, v)
        if op == OR:
            return self._or(u, v)
        if op == XOR:
            return self._xor(u, v)
        if op == IMPLIES:
            return self._or(self._not(u), v)
        if op == IFF:
            return self._not(self._xor(u, v))
        if op == DIFF:
            return self._and(u, self._not(v))
        raise BddError(f'unknown operator {op!r}')

    def apply(self, op: str, f: NodeRef, g: NodeRef) -> NodeRef:
        """Canonical diagram of ``op(f, g)``; ``op`` is one of :data:`OPERATORS`."""
        u, v = self._unwrap(f), self._unwrap(g)
        self._maybe_trim()
        return self._wrap(self._apply_ids(op, u, v))

    def negate(self, f: NodeRef) -> NodeRef:
        return self._wrap(self._not(self._unwrap(f)))

    def ite(self, c: NodeRef, t: NodeRef, e: NodeRef) -> NodeRef:
        cu, tu, eu = self._unwrap(c), self._unwrap(t), self._unwrap(e)
        return self._wrap(self._or(self._and(cu, tu), self._and(self._not(cu), eu)))

    def conjoin(self, fs: Iterable[NodeRef]) -> NodeRef:
        u = ONE_ID
        for f in fs:
            u = self._and(u, self._unwrap(f))
        return self._wrap(u)

    def disjoin(self, fs: Iterable[NodeRef]) -> NodeRef:
        u = ZERO_ID
        for f in fs:
            u = self._or(u, self._unwrap(f))
        return self._wrap(u)

    # ------------------------------------------------------------------
    # cofactors and quantification

    def restrict(self, f: NodeRef, v: int, value: bool) -> NodeRef:
        """Cofactor of ``f`` with variable ``v`` fixed to ``value``."""
        self._check_var(v)
        return self.let({v: bool(value)}, f)

    def let(self, assignment: Mapping[int, bool], f: NodeRef) -> NodeRef:
        """Cofactor with respect to several variables at once."""
        u = self._unwrap(f)
        if not assignment:
            return f
        for v in assignment:
            self._check_var(v)
        assign = {v: bool(b) for v, b in assignment.items()}
        top = max(assign)
        memo: Dict[int, int] = {}

        def rec(w: int) -> int:
            if w <= ONE_ID:
                return w
            x = self._var[w]
            if x > top:
                return w
            r = memo.get(w)
            if r is not None:
                return r
            if x in assign:
                r = rec(self._hi[w] if assign[x] else self._lo[w])
            else:
                r = self._mk(x, rec(self._lo[w]), rec(self._hi[w]))
            memo[w] = r
            return r

        return self._wrap(rec(u))

    def _varset_key(self, vs: frozenset) -> int:
        k = self._varsets.get(vs)
        if k is None:
            k = len(self._varsets)
            self._varsets[vs] = k
        return k

    def _as_varset(self, vars: Iterable[int]) -> frozenset:
        vs = frozenset(vars)
        for v in vs:
            self._check_var(v)
        return vs

    def _exists(self, u: int, vs: frozenset, key: int, top: int) -> int:
        if u <= ONE_ID:
            return u
        x = self._var[u]
        if x > top:
            return u
        ck = (u, key)
        cache = self._exists_cache
        r = cache.get(ck)
        if r is not None:
            return r
        lo = self._exists(self._lo[u], vs, key, top)
        if x in vs:
            if lo == ONE_ID:
                r = ONE_ID
            else:
                r = self._or(lo, self._exists(self._hi[u], vs, key, top))
        else:
            r = self._mk(x, lo, self._exists(self._hi[u], vs, key, top))
        cache[ck] = r
        return r

    def exists(self, f: NodeRef, vars: Iterable[int]) -> NodeRef:
        """Existentially quantify ``vars`` out of ``f``."""
        u = self._unwrap(f)
        vs = self._as_varset(vars)
        if not vs:
            return f
        self._maybe_trim()
        return self._wrap(self._exists(u, vs, self._varset_key(vs), max(vs)))

    def forall(self, f: NodeRef, vars: Iterable[int]) -> NodeRef:
        return self.negate(self.exists(self.negate(f), vars))

    def _relprod(self, u: int, v: int, vs: frozenset, key: int, top: int) -> int:
        if u == ZERO_ID or v == ZERO_ID:
            return ZERO_ID
        if u == ONE_ID and v == ONE_ID:
            return ONE_ID
        if u == ONE_ID or u == v:
            return self._exists(v, vs, key, top)
        if v == ONE_ID:
            return self._exists(u, vs, key, top)
        var = self._var
        a, b = var[u], var[v]
        x = a if a < b else b
        if x > top:
            return self._and(u, v)
        if u > v:
            u, v = v, u
            a, b = b, a
        ck = (u, v, key)
        cache = self._relprod_cache
        r = cache.get(ck)
        if r is not None:
            return r
        if a == b:
            u0, u1, v0, v1 = self._lo[u], self._hi[u], self._lo[v], self._hi[v]
        elif a < b:
            u0, u1, v0, v1 = self._lo[u], self._hi[u], v, v
        else:
            u0, u1, v0, v1 = u, u, self._lo[v], self._hi[v]
        lo = self._relprod(u0, v0, vs, key, top)
        if x in vs:
            if lo == ONE_ID:
                r = ONE_ID
            else:
                r = self._or(lo, self._relprod(u1, v1, vs, key, top))
        else:
            r = self._mk(x, lo, self._relprod(u1, v1, vs, key, top))
        cache[ck] = r
        return r

    def and_exists(self, f: NodeRef, g: NodeRef, vars: Iterable[int]) -> NodeRef:
        """``exists(f & g, vars)`` in one traversal (relational product)."""
        u, v = self._unwrap(f), self._unwrap(g)
        vs = self._as_varset(vars)
        self._maybe_trim()
        if not vs:
            return self._wrap(self._and(u, v))
        return self._wrap(self._relprod(u, v, vs, self._varset_key(vs), max(vs)))

    def rename(self, f: NodeRef, pairing: Mapping[int, int] | Sequence[Tuple[int, int]]) -> NodeRef:
        """Substitute variables: each ``from`` variable becomes its ``to`` variable.

        A target variable may not occur in the support of ``f``.
        """
        u = self._unwrap(f)
        pairs = dict(pairing)
        if not pairs:
            return f
        for a, b in pairs.items():
            self._check_var(a)
            self._check_var(b)
        if len(set(pairs.values())) != len(pairs):
            raise BddError('rename targets must be distinct')
        support = self._support(u)
        clash = sorted(b for b in pairs.values() if b in support)
        if clash:
            raise BddError(f'rename target variables {clash} occur in the support')
        mapping = {v: pairs.get(v, v) for v in support}
        order = sorted(support)
        monotone = all(mapping[order[i]] < mapping[order[i + 1]]
                       for i in range(len(order) - 1))
        key = self._varset_key(frozenset(pairs.items()))
        cache = self._rename_cache
        if monotone:
            def rec(w: int) -> int:
                if w <= ONE_ID:
                    return w
                ck = (w, key)
                r = cache.get(ck)
                if r is not None:
                    return r
                x = self._var[w]
                r = self._mk(mapping[x], rec(self._lo[w]), rec(self._hi[w]))
                cache[ck] = r
                return r
        else:
            def rec(w: int) -> int:
                if w <= ONE_ID:
                    return w
                ck = (w, key)
                r = cache.get(ck)
                if r is not None:
                    return r
                x = mapping[self._var[w]]
                lit = self._mk(x, ZERO_ID, ONE_ID)
                r = self._or(self._and(lit, rec(self._hi[w])),
                             self._and(self._not(lit), rec(self._lo[w])))
                cache[ck] = r
                return r
        return self._wrap(rec(u))

    # ------------------------------------------------------------------
    # inspection

    def _support(self, u: int) -> set:
        seen = set()
        out = set()
        stack = [u]
        while stack:
            w = stack.pop()
            if w <= ONE_ID or w in seen:
                continue
            seen.add(w)
            out.add(self._var[w])
            stack.append(self._lo[w])
            stack.append(self._hi[w])
        return out

    def support(self, f: NodeRef) -> frozenset:
        """Variables ``f`` depends on."""
        return frozenset(self._support(self._unwrap(f)))

    def evaluate(self, f: NodeRef, assignment: Mapping[int, bool]) -> bool:
        """Follow the path selected by ``assignment`` from the root."""
        u = self._unwrap(f)
        while u > ONE_ID:
            x = self._var[u]
            try:
                value = assignment[x]
            except KeyError:
                raise BddError(f'assignment misses variable {x}') from None
            u = self._hi[u] if value else self._lo[u]
        return u == ONE_ID

    def _nodes(self, u: int) -> List[int]:
        """Internal nodes reachable from ``u``, children before parents."""
        out: List[int] = []
        seen = set()
        stack = [(u, False)]
        while stack:
            w, done = stack.pop()
            if w <= ONE_ID:
                continue
            if done:
                out.append(w)
                continue
            if w in seen:
                continue
            seen.add(w)
            stack.append((w, True))
            stack.append((self._hi[w], False))
            stack.append((self._lo[w], False))
        return out

    def node_count(self, f: NodeRef) -> int:
        """Number of distinct internal nodes reachable from ``f``."""
        return len(self._nodes(self._unwrap(f)))

    def _check_over(self, u: int, over: Sequence[int]) -> List[int]:
        order = sorted(set(over))
        for v in order:
            self._check_var(v)
        missing = self._support(u) - set(order)
        if missing:
            raise BddError(f'support variables {sorted(missing)} not in the counted set')
        return order

    def count_sat(self, f: NodeRef, over: Iterable[int]) -> int:
        """Number of satisfying assignments to the variables ``over``."""
        u = self._unwrap(f)
        order = self._check_over(u, list(over))
        pos = {v: i for i, v in enumerate(order)}
        n = len(order)

        def level(w: int) -> int:
            return n if w <= ONE_ID else pos[self._var[w]]

        memo: Dict[int, int] = {ZERO_ID: 0, ONE_ID: 1}
        for w in self._nodes(u):
            lw = level(w)
            lo, hi = self._lo[w], self._hi[w]
            memo[w] = (memo[lo] << (level(lo) - lw - 1)) + (memo[hi] << (level(hi) - lw - 1))
        return memo[u] << level(u)

    def enumerate_sat(self, f: NodeRef, over: Iterable[int]) -> Iterator[Dict[int, bool]]:
        """Yield every satisfying assignment over ``over``.

        Assignments come out in lexicographic order of the variable order,
        with false before true.
        """
        u = self._unwrap(f)
        order = self._check_over(u, list(over))
        n = len(order)
        values = [False] * n
        var, lo, hi = self._var, self._lo, self._hi

        def rec(w: int, i: int):
            if w == ZERO_ID:
                return
            if i == n:
                yield dict(zip(order, values))
                return
            x = order[i]
            if w != ONE_ID and var[w] == x:
                values[i] = False
                yield from rec(lo[w], i + 1)
                values[i] = True
                yield from rec(hi[w], i + 1)
            else:
                values[i] = False
                yield from rec(w, i + 1)
                values[i] = True
                yield from rec(w, i + 1)

        return rec(u, 0)

    def pick(self, f: NodeRef, over: Iterable[int]) -> Optional[Dict[int, bool]]:
        """First assignment of :meth:`enumerate_sat`, or ``None``."""
        return next(self.enumerate_sat(f, over), None)

    def check(self, f: NodeRef) -> None:
        """Audit ordering and reduction rules below ``f``; raise on violation."""
        u = self._unwrap(f)
        for w in self._nodes(u):
            x, lo, hi = self._var[w], self._lo[w], self._hi[w]
            if lo == hi:
                raise BddError(f'node {w} has identical children')
            if not (x < self._var[lo] and x < self._var[hi]):
                raise BddError(f'node {w} violates the variable order')
            if self._unique.get((x, lo, hi)) != w:
                raise BddError(f'node {w} is not the unique node for its triple')

    # ------------------------------------------------------------------
    # serialization

    def dump(self, f: NodeRef) -> List[str]:
        """Text lines ``node <id> <var> <low> <high>`` then ``root <id>``.

        Terminals are ids 0 and 1; internal ids are renumbered from 2 in
        bottom-up order.
        """
        u = self._unwrap(f)
        ids = {ZERO_ID: 0, ONE_ID: 1}
        lines = []
        for w in self._nodes(u):
            ids[w] = len(ids)
            lines.append(f'node {ids[w]} {self._var[w]} {ids[self._lo[w]]} {ids[self._hi[w]]}')
        lines.append(f'root {ids[u]}')
        return lines

    def load(self, lines: Iterable[str]) -> NodeRef:
        """Rebuild a diagram written by :meth:`dump`."""
        ids = {0: ZERO_ID, 1: ONE_ID}
        for raw in lines:
            parts = raw.split()
            if not parts:
                continue
            if parts[0] == 'node' and len(parts) == 5:
                k, v, lo, hi = (int(p) for p in parts[1:])
                self._check_var(v)
                try:
                    lo_u, hi_u = ids[lo], ids[hi]
                except KeyError:
                    raise BddError(f'node {k} refers to an undefined child') from None
                if self._var[lo_u] <= v or self._var[hi_u] <= v:
                    raise BddError(f'node {k} violates the variable order')
                ids[k] = self._mk(v, lo_u, hi_u)
            elif parts[0] == 'root' and len(parts) == 2:
                try:
                    return self._wrap(ids[int(parts[1])])
                except KeyError:
                    raise BddError('root refers to an undefined node') from None
            else:
                raise BddError(f'malformed diagram line: {raw!r}')
        raise BddError('diagram has no root line')

    def to_dot(self, f: NodeRef) -> str:
        """Graphviz source; low edges dotted, high edges solid."""
        u = self._unwrap(f)
        out = ['digraph bdd {', '  n0 [shape=box,label="0"];', '  n1 [shape=box,label="1"];']
        for w in self._nodes(u):
            out.append(f'  n{w} [label="{self.names[self._var[w]]}"];')
            out.append(f'  n{w} -> n{self._lo[w]} [style=dotted];')
            out.append(f'  n{w} -> n{self._hi[w]};')
        out.append('}')
        return '\n'.join(out)
