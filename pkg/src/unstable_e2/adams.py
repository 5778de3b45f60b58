"""Cotriple resolutions of space cohomologies and the unstable Adams E2 chart.

The resolution iterates the free unstable algebra monad on the reduced
cohomology of a space: level s is free on the full monomial basis of level
s-1.  Face maps evaluate one formal layer (the outermost face evaluates
formal generators as elements, inner faces push the evaluation inward);
degeneracies insert formal layers.  Everything is stored as matrices on
monomial bases and the simplicial identities are verified as matrix
equalities on demand.

Cochain groups of the derivation complex against a suspension-type target
need only the generator data of each level, which is what makes s_max 2-3
feasible: level s is materialized through its basis and through the full
face matrices of the level below, never through anything deeper.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import steenrod as st
from . import tower
from .derivations import CochainComplex
from .unstable_algebras import (
    FTAlgebra,
    FreeUnstableAlgebra,
    extend_algebra_map,
)
from .unstable_modules import FTUnstableModule, GradedVS


class BudgetExceeded(Exception):
    """A resolution level outgrew the configured memory budget."""


class ChartError(Exception):
    """Refused chart computation (insufficient truncation, bad window, ...)."""


# ---------------------------------------------------------------------------
# built-in space catalog
# ---------------------------------------------------------------------------

@dataclass
class SpaceModel:
    """Reduced mod-p cohomology of a catalog space, with generator bookkeeping."""

    name: str
    p: int
    D: int
    algebra: FTAlgebra
    generators: tuple  # ((name, degree), ...) algebra generators
    gen_monomials: dict = field(default_factory=dict)  # basis name -> ((gen, exp), ...)

    def top_degree(self):
        degs = self.algebra.graded_vs().degrees()
        return max(degs) if degs else 0


def builtin_space(name, p, D):
    """Catalog: sphere(n) as S<n>, K(F_p,n) as K<n>, point, products A*B of two."""
    text = name.strip().lower()
    for sep in ("*", "x"):
        if sep in text and not text.startswith("k("):
            parts = text.split(sep)
            if len(parts) == 2 and all(_parse_atom(q) for q in parts):
                a = _atom_space(_parse_atom(parts[0]), p, D)
                b = _atom_space(_parse_atom(parts[1]), p, D)
                return _product_space(a, b, name, p, D)
    atom = _parse_atom(text)
    if atom is None:
        raise ValueError(f"unknown space {name!r}")
    return _atom_space(atom, p, D)


def _parse_atom(text):
    text = text.strip().lower()
    if text in ("point", "pt", "*"):
        return ("point", 0)
    if text.startswith("s") and text[1:].isdigit():
        return ("sphere", int(text[1:]))
    if text.startswith("k") and text[1:].isdigit():
        return ("k", int(text[1:]))
    if text.startswith("k(") and text.endswith(")"):
        inner = text[2:-1].split(",")
        return ("k", int(inner[-1]))
    if text.startswith("sphere(") and text.endswith(")"):
        return ("sphere", int(text[7:-1]))
    return None


def _atom_space(atom, p, D):
    kind, n = atom
    if kind == "point":
        mod = FTUnstableModule(p, D, {}, {})
        return SpaceModel("point", p, D, FTAlgebra(mod, {}), ())
    if kind == "sphere":
        if n < 1:
            raise ValueError("spheres need n >= 1")
        name = f"s{n}"
        mod = FTUnstableModule(p, D, {n: (name,)}, {})
        prods = {(name, name): {}} if 2 * n <= D else {}
        return SpaceModel(
            f"S{n}", p, D, FTAlgebra(mod, prods), ((name, n),),
            {name: ((name, 1),)},
        )
    if kind == "k":
        if n < 1:
            raise ValueError("K(F_p, n) needs n >= 1")
        return _k_space(n, p, D)
    raise ValueError(f"unknown atom {atom}")


def _k_space(n, p, D):
    """K(F_p, n): tables generated from the free unstable algebra on one class."""
    gen = f"i{n}"
    A = FreeUnstableAlgebra(p, [(gen, n)], D)
    names = {}
    basis = {}
    for d, m in A.reduced_basis_items():
        nm = f"k{d}_{len(basis.setdefault(d, []))}"
        basis[d].append(nm)
        names[m] = nm
    basis = {d: tuple(v) for d, v in basis.items()}

    def vec_to_names(vec):
        return {names[m]: c for m, c in vec.items() if m}

    action = {}
    letters = [(0, s) for s in range(1, D + 1)] + ([(1, 0)] if p != 2 else [])
    for eps, s in letters:
        cols = {}
        for d, m in A.reduced_basis_items():
            if d + st.letter_degree((eps, s), p) > D:
                continue
            img = A.act_letter(eps, s, {m: 1})
            if img:
                cols[names[m]] = vec_to_names(img)
        if cols:
            action[(eps, s)] = cols
    mod = FTUnstableModule(p, D, basis, action)
    prods = {}
    for d1, m1 in A.reduced_basis_items():
        for d2, m2 in A.reduced_basis_items():
            if d1 + d2 > D or names[m1] > names[m2]:
                continue
            r = A.mul_monomials(m1, m2)
            col = {} if r is None else {names[r[1]]: r[0]}
            prods[(names[m1], names[m2])] = col
    # factor each basis class into polygen classes, for hom-set enumeration and
    # for the contracting homotopy available over a free base
    gm = {}
    for d, m in A.reduced_basis_items():
        gm[names[m]] = tuple((names[((i, 1),)], e) for i, e in m)
    gens = tuple(sorted((names[((i, 1),)], A.pg_degree[i]) for i in range(len(A.polygens))))
    return SpaceModel(f"K{n}", p, D, FTAlgebra(mod, prods), gens, gm)


def _product_space(a: SpaceModel, b: SpaceModel, name, p, D):
    """Kunneth tensor of two catalog spaces."""
    basis = {}
    pairs = []
    avs, bvs = a.algebra.graded_vs(), b.algebra.graded_vs()
    for da, na in list(avs.items()):
        pairs.append((da, na, 0, "1"))
    for db, nb in list(bvs.items()):
        pairs.append((0, "1", db, nb))
    for da, na in list(avs.items()):
        for db, nb in list(bvs.items()):
            if da + db <= D:
                pairs.append((da, na, db, nb))
    def tname(na, nb):
        return f"{na}|{nb}"
    for da, na, db, nb in pairs:
        basis.setdefault(da + db, []).append(tname(na, nb))
    basis = {d: tuple(sorted(v)) for d, v in basis.items()}

    def mul_side(alg, x, y):
        if x == "1":
            return {y: 1}
        if y == "1":
            return {x: 1}
        return alg.mul_names(x, y)

    def deg_side(sm, x):
        return 0 if x == "1" else sm.algebra.module.degree_of[x]

    prods = {}
    for da1, na1, db1, nb1 in pairs:
        for da2, na2, db2, nb2 in pairs:
            d = da1 + db1 + da2 + db2
            if d > D:
                continue
            n1, n2 = tname(na1, nb1), tname(na2, nb2)
            if n1 > n2:
                continue
            sign = 1
            if p != 2 and (db1 * da2) % 2:
                sign = -1
            col = {}
            for xa, ca in mul_side(a.algebra, na1, na2).items():
                for xb, cb in mul_side(b.algebra, nb1, nb2).items():
                    if xa == "1" and xb == "1":
                        continue
                    col[tname(xa, xb)] = (col.get(tname(xa, xb), 0) + sign * ca * cb) % p
            prods[(n1, n2)] = {k: v for k, v in col.items() if v}
    action = {}
    letters = sorted(set(a.algebra.module.action) | set(b.algebra.module.action))
    for letter in letters:
        eps, s = letter
        cols = {}
        for da, na, db, nb in pairs:
            out = {}
            splits = [(s0, s - s0) for s0 in range(0, s + 1)] if eps == 0 else None
            if eps == 0:
                for s0, s1 in splits:
                    va = {na: 1} if s0 == 0 else ({} if na == "1" else a.algebra.module.act_word(((0, s0),), na))
                    vb = {nb: 1} if s1 == 0 else ({} if nb == "1" else b.algebra.module.act_word(((0, s1),), nb))
                    for xa, ca in va.items():
                        for xb, cb in vb.items():
                            key = tname(xa, xb)
                            out[key] = (out.get(key, 0) + ca * cb) % p
            else:
                va = {} if na == "1" else a.algebra.module.act_word(((1, 0),), na)
                for xa, ca in va.items():
                    out[tname(xa, nb)] = (out.get(tname(xa, nb), 0) + ca) % p
                vb = {} if nb == "1" else b.algebra.module.act_word(((1, 0),), nb)
                sgn = -1 if (p != 2 and da % 2) else 1
                for xb, cb in vb.items():
                    out[tname(na, xb)] = (out.get(tname(na, xb), 0) + sgn * cb) % p
            out = {k: v for k, v in out.items() if v and k != "1|1"}
            if out:
                cols[tname(na, nb)] = out
        if cols:
            action[letter] = cols
    mod = FTUnstableModule(p, D, basis, action)
    gens = tuple((tname(n, "1"), d) for n, d in a.generators) + tuple(
        (tname("1", n), d) for n, d in b.generators
    )
    gm = {}
    for da, na, db, nb in pairs:
        parts = []
        if na != "1":
            parts += [(tname(x, "1"), e) for x, e in a.gen_monomials.get(na, ((na, 1),))]
        if nb != "1":
            parts += [(tname("1", x), e) for x, e in b.gen_monomials.get(nb, ((nb, 1),))]
        gm[tname(na, nb)] = tuple(parts)
    return SpaceModel(name, p, D, FTAlgebra(mod, prods), gens, gm)


# ---------------------------------------------------------------------------
# the cotriple resolution
# ---------------------------------------------------------------------------

class CotripleResolution:
    """Levels 0..s_max of the free-algebra monad iterated on reduced cohomology.

    V[s] lists the generators of level s as (degree, key) pairs; V[s+1] is
    the full monomial basis of level s.  face_full[s][i] is the matrix of
    the i-th face from level s to level s-1 on monomial bases (columns are
    V[s+1], rows V[s]); degen_full[s][j] likewise for degeneracies.
    """

    def __init__(self, space: SpaceModel, s_max, D, budget=500_000):
        self.space = space
        self.p = space.p
        self.s_max = s_max
        self.D = D
        if D > space.D:
            raise ChartError(f"space tables stop at degree {space.D}, need {D}")
        self.levels = []
        self.V = []
        v0 = [(d, nm) for d, nm in space.algebra.graded_vs().items() if d <= D]
        self.V.append(sorted(v0))
        total = len(v0)
        for s in range(0, s_max + 1):
            gens = [(key, d) for d, key in self.V[s]]
            level = FreeUnstableAlgebra(self.p, gens, D)
            self.levels.append(level)
            vnext = sorted((d, m) for d, m in level.reduced_basis_items())
            total += len(vnext)
            if total > budget:
                raise BudgetExceeded(
                    f"resolution level {s + 1} pushes basis count past {budget} "
                    f"(degree cap {D})"
                )
            self.V.append(vnext)
        self._vidx = [
            {key: i for i, (_, key) in enumerate(vs)} for vs in self.V
        ]
        self.face_full = []
        self.degen_full = []
        self._build_faces()
        self._build_degens()

    # -- construction ---------------------------------------------------------

    def _images_to_matrix(self, images, level_to, level_from):
        """Dict {source monomial: target vector} into a matrix on the V bases."""
        rows = self._vidx[level_to]
        nrows = len(self.V[level_to])
        cols = [key for _, key in self.V[level_from]]
        M = np.zeros((nrows, len(cols)), dtype=np.int64)
        for j, m in enumerate(cols):
            for key, c in images[m].items():
                M[rows[key], j] = c % self.p
        return M

    def _gen_vec_from_column(self, column, level_to):
        """Column over V[level_to] as a generator-combination vector in that level."""
        level = self.levels[level_to]
        out = {}
        for i, c in enumerate(column):
            if c:
                _, key = self.V[level_to][i]
                out[((level.pg_index[((), key)], 1),)] = int(c)
        return out

    def _build_faces(self):
        for s in range(0, self.s_max + 1):
            mats = []
            source = self.levels[s]
            for i in range(0, s + 1):
                if i == 0:
                    if s == 0:
                        target = self.space.algebra
                        gen_images = {key: {key: 1} for _, key in self.V[0]}
                        images = extend_algebra_map(source, target, gen_images)
                        out = {m: {k: c for k, c in vec.items()} for m, vec in images.items()}
                        mats.append(self._images_to_matrix(out, 0, 1))
                    else:
                        target = self.levels[s - 1]
                        gen_images = {key: {key: 1} for _, key in self.V[s]}
                        images = extend_algebra_map(source, target, gen_images)
                        mats.append(self._images_to_matrix(images, s, s + 1))
                else:
                    prev = self.face_full[s - 1][i - 1]
                    target = self.levels[s - 1]
                    gen_images = {}
                    for j, (_, key) in enumerate(self.V[s]):
                        gen_images[key] = self._gen_vec_from_column(prev[:, j], s - 1)
                    images = extend_algebra_map(source, target, gen_images)
                    mats.append(self._images_to_matrix(images, s, s + 1))
            self.face_full.append(mats)

    def _insertion_vector(self, s, key):
        """Generator of level s+1 naming the length-one monomial on `key` of level s."""
        inner = ((self.levels[s].pg_index[((), key)], 1),)
        outer = ((self.levels[s + 1].pg_index[((), inner)], 1),)
        return {outer: 1}

    def _build_degens(self):
        for s in range(0, self.s_max):
            mats = []
            source = self.levels[s]
            for j in range(0, s + 1):
                if j == 0:
                    gen_images = {
                        key: self._insertion_vector(s, key) for _, key in self.V[s]
                    }
                else:
                    prev = self.degen_full[s - 1][j - 1]
                    gen_images = {}
                    for jj, (_, key) in enumerate(self.V[s]):
                        gen_images[key] = self._gen_vec_from_column(prev[:, jj], s + 1)
                images = extend_algebra_map(source, self.levels[s + 1], gen_images)
                mats.append(self._images_to_matrix(images, s + 2, s + 1))
            self.degen_full.append(mats)

    # -- checks -----------------------------------------------------------------

    def verify_simplicial_identities(self):
        """All identities d_i d_j = d_{j-1} d_i (i<j) etc., as matrix equalities."""
        p = self.p
        mm = tower.matmul_mod
        bad = []
        for s in range(1, self.s_max + 1):
            for j in range(0, s + 1):
                for i in range(0, j):
                    lhs = mm(self.face_full[s - 1][i], self.face_full[s][j], p)
                    rhs = mm(self.face_full[s - 1][j - 1], self.face_full[s][i], p)
                    if not np.array_equal(lhs, rhs):
                        bad.append(("dd", s, i, j))
        for s in range(0, self.s_max - 1):
            for j in range(0, s + 1):
                for i in range(0, j + 1):
                    lhs = mm(self.degen_full[s + 1][j + 1], self.degen_full[s][i], p)
                    rhs = mm(self.degen_full[s + 1][i], self.degen_full[s][j], p)
                    if not np.array_equal(lhs, rhs):
                        bad.append(("ss", s, i, j))
        for s in range(0, self.s_max):
            for j in range(0, s + 1):
                for i in range(0, s + 2):
                    comp = mm(self.face_full[s + 1][i], self.degen_full[s][j], p)
                    n = comp.shape[1]
                    if i == j or i == j + 1:
                        if not np.array_equal(comp, np.eye(n, dtype=np.int64)):
                            bad.append(("ds-id", s, i, j))
                    elif i < j:
                        rhs = mm(self.degen_full[s - 1][j - 1], self.face_full[s][i], p)
                        if not np.array_equal(comp, rhs):
                            bad.append(("ds", s, i, j))
                    else:
                        rhs = mm(self.degen_full[s - 1][j], self.face_full[s][i - 1], p)
                        if not np.array_equal(comp, rhs):
                            bad.append(("sd", s, i, j))
        return bad

    def extra_degeneracy(self):
        """Contracting homotopy when the base cohomology is itself free.

        Returns matrices h[s]: level s-1 -> level s on monomial bases (with
        h[0]: the base algebra -> level 0), satisfying d_last h = id and
        d_i h = h d_i for i < last; only defined for free base cohomology.
        """
        space = self.space
        if not space.gen_monomials:
            raise ValueError("extra degeneracy needs a free base cohomology")
        h = []
        # h0: base -> level 0, generator g -> [g], extended multiplicatively
        lvl0 = self.levels[0]
        images = {}
        for d, nm in self.V[0]:
            vec = {(): 1}
            for g, e in space.gen_monomials[nm]:
                gv = {((lvl0.pg_index[((), g)], 1),): 1}
                for _ in range(e):
                    vec = lvl0.mul(vec, gv)
            images[nm] = vec
        M0 = np.zeros((len(self.V[1]), len(self.V[0])), dtype=np.int64)
        rows = self._vidx[1]
        for j, (_, nm) in enumerate(self.V[0]):
            for m, c in images[nm].items():
                M0[rows[m], j] = c % self.p
        h.append(M0)
        for s in range(0, self.s_max):
            source = self.levels[s]
            gen_images = {}
            for j, (_, key) in enumerate(self.V[s]):
                gen_images[key] = self._gen_vec_from_column(h[s][:, j], s + 1)
            images = extend_algebra_map(source, self.levels[s + 1], gen_images)
            h.append(self._images_to_matrix(images, s + 2, s + 1))
        return h

    # -- the derivation cochain complex -----------------------------------------

    def der_cochain_complex(self, M: GradedVS, top_s, normalized=False, m_act=None):
        """Hom(generators of each level, M) with cofaces from the face maps.

        m_act(word) may supply the operation action on M as a dict-of-dicts
        matrix {m_name: {m_name2: coeff}}; None means the trivial action.
        """
        p = self.p
        if top_s > self.s_max + 1:
            raise ChartError(f"resolution holds {self.s_max + 1} levels, need {top_s + 1}")
        bases = []
        for s in range(0, top_s + 1):
            basis = []
            for vi, (d, key) in enumerate(self.V[s]):
                for mn in M.basis.get(d, ()):
                    basis.append((vi, mn))
            bases.append(basis)
        dims = [len(b) for b in bases]
        maps = []
        for s in range(0, top_s):
            rows = {b: i for i, b in enumerate(bases[s + 1])}
            cols = {b: i for i, b in enumerate(bases[s])}
            Mmat = np.zeros((dims[s + 1], dims[s]), dtype=np.int64)
            # delta^0: classify each generator of level s+1 (a monomial of level s)
            proj = self._generator_classification(s)
            for vi, (d, key) in enumerate(self.V[s + 1]):
                for src_vi, word, coeff in proj.get(vi, ()):
                    if word == ():
                        for mn in M.basis.get(d, ()):
                            r = rows.get((vi, mn))
                            c = cols.get((src_vi, mn))
                            if r is not None and c is not None:
                                Mmat[r, c] = (Mmat[r, c] + coeff) % p
                    elif m_act is not None:
                        act = m_act(word)
                        d_src = self.V[s][src_vi][0]
                        for mn_src in M.basis.get(d_src, ()):
                            for mn_t, cc in act.get(mn_src, {}).items():
                                r = rows.get((vi, mn_t))
                                c = cols.get((src_vi, mn_src))
                                if r is not None and c is not None:
                                    Mmat[r, c] = (Mmat[r, c] + coeff * cc) % p
            # delta^i, i >= 1: duals of the full face matrices one level down
            for i in range(1, s + 2):
                F = self.face_full[s][i - 1]
                sign = -1 if i % 2 else 1
                for (vi, mn), r in rows.items():
                    col = F[:, vi]
                    for src_vi in np.nonzero(col)[0]:
                        d_src = self.V[s][src_vi][0]
                        c = cols.get((int(src_vi), mn))
                        if c is not None:
                            Mmat[r, c] = (Mmat[r, c] + sign * int(col[src_vi])) % p
            maps.append(Mmat % p)
        if normalized:
            return self._normalized_complex(bases, dims, maps, top_s)
        return CochainComplex(p, dims, maps)

    def _generator_classification(self, s):
        """For each generator of level s+1: its single-polygen content in level s.

        Returns {V[s+1] index: ((V[s] index, word, coeff), ...)}; decomposable
        monomials classify to nothing (square-zero targets kill them).
        """
        out = {}
        level = self.levels[s]
        for vi, (d, key) in enumerate(self.V[s + 1]):
            if len(key) == 1 and key[0][1] == 1:
                w, genkey = level.polygens[key[0][0]]
                out[vi] = ((self._vidx[s][genkey], w, 1),)
        return out

    def _normalized_complex(self, bases, dims, maps, top_s):
        """Restrict to the intersection of codegeneracy kernels."""
        p = self.p
        sub_bases = []
        for s in range(0, top_s + 1):
            if s == 0 or not bases[s]:
                sub_bases.append(np.eye(dims[s], dtype=np.int64))
                continue
            stack = []
            rows = {b: i for i, b in enumerate(bases[s - 1])}
            cols = {b: i for i, b in enumerate(bases[s])}
            for j in range(0, s):
                # codegeneracy on cochains: precompose the degeneracy
                # level s-1 -> level s, evaluated on generators
                cod = np.zeros((dims[s - 1], dims[s]), dtype=np.int64)
                for vi, (d, key) in enumerate(self.V[s - 1]):
                    if j == 0:
                        targets = [(self._insertion_index(s - 1, key), 1)]
                    else:
                        col = self.degen_full[s - 2][j - 1][:, vi]
                        targets = [(int(ti), int(col[ti])) for ti in np.nonzero(col)[0]]
                    for mn in M_names(bases[s - 1], vi):
                        r = rows.get((vi, mn))
                        for ti, c in targets:
                            cidx = cols.get((ti, mn))
                            if r is not None and cidx is not None:
                                cod[r, cidx] = (cod[r, cidx] + c) % p
                stack.append(cod)
            K = tower.kernel_basis(np.concatenate(stack, axis=0), p)
            sub_bases.append(K.T)
        new_dims = [sb.shape[1] for sb in sub_bases]
        new_maps = []
        for s in range(0, top_s):
            img = (maps[s] @ sub_bases[s]) % p
            expressed = []
            for col in img.T:
                sol = tower.solve(sub_bases[s + 1], col, p)
                if sol is None:
                    raise ValueError("differential does not preserve the normalized subcomplex")
                expressed.append(sol)
            if expressed:
                new_maps.append(np.array(expressed, dtype=np.int64).T % p)
            else:
                new_maps.append(np.zeros((new_dims[s + 1], 0), dtype=np.int64))
        return CochainComplex(p, new_dims, new_maps)

    def _insertion_index(self, s, key):
        inner = ((self.levels[s].pg_index[((), key)], 1),)
        return self._vidx[s + 1][inner]


def M_names(basis, vi):
    return [b for (v2, b) in basis if v2 == vi]


def cotriple_resolution(space: SpaceModel, s_max, D, budget=500_000):
    return CotripleResolution(space, s_max, D, budget)


# ---------------------------------------------------------------------------
# charts
# ---------------------------------------------------------------------------

@dataclass
class Chart:
    p: int
    kind: str  # "adams" | "gh"
    s_max: int
    t_max: int
    D: int
    entries: dict  # {(s, t): dim}, plus (0, 0) for the hom-set cell
    fringe_set_size: int | None = None
    tower_level: int | None = None

    def dim(self, s, t):
        return self.entries.get((s, t), 0)


def suspension_target(Y: SpaceModel, t):
    """Sigma^t of the unreduced cohomology of Y, as a graded vector space."""
    basis = {t: ("u",)}
    for d, nm in Y.algebra.graded_vs().items():
        basis.setdefault(d + t, ())
        basis[d + t] = basis[d + t] + (nm,)
    return GradedVS(Y.p, basis)


def suspension_has_trivial_action(Y: SpaceModel):
    return not any(cols for cols in Y.algebra.module.action.values())


def adams_chart(X: SpaceModel, Y: SpaceModel, s_max, t_max, D, budget=500_000,
                resolution=None):
    """The unstable Adams E2 chart on the window, plus the (0,0) hom-set cell."""
    d_needed = t_max + Y.top_degree()
    if D < d_needed:
        raise ChartError(
            f"truncation D={D} below the sufficiency bound t_max + top(H*Y) = {d_needed}"
        )
    res = resolution or cotriple_resolution(X, s_max + 1, d_needed, budget)
    m_act = None
    if not suspension_has_trivial_action(Y):
        mod = Y.algebra.module

        def m_act(word):
            out = {}
            for d, nm in mod.vs.items():
                img = mod.act_word(word, nm)
                if img:
                    out[nm] = img
            return out

    entries = {}
    for t in range(1, t_max + 1):
        M = suspension_target(Y, t)
        cc = res.der_cochain_complex(M, s_max + 1, m_act=m_act)
        dims = cc.cohomology_dims(s_max)
        for s, dim in enumerate(dims):
            if dim:
                entries[(s, t)] = dim
    count = hom_set_count(X, Y)
    r = 0
    while X.p ** r < count:
        r += 1
    if X.p ** r != count:
        raise ChartError(f"hom-set cardinality {count} is not a p-power")
    entries[(0, 0)] = r
    return Chart(X.p, "adams", s_max, t_max, D, entries, fringe_set_size=count)


def hom_set_count(X: SpaceModel, Y: SpaceModel):
    """Cardinality of the set of unstable algebra maps H*X -> H*Y."""
    p = X.p
    gens = X.generators
    if not gens:
        return 1
    cands = []
    for gname, d in gens:
        names = Y.algebra.graded_vs().basis.get(d, ())
        vecs = [{}]
        for nm in names:
            vecs = [dict(v, **({nm: c} if c else {})) for v in vecs for c in range(p)]
        cands.append(vecs)
    import itertools as it

    count = 0
    for assignment in it.product(*cands):
        gen_images = {g[0]: dict(v) for g, v in zip(gens, assignment)}
        if _algebra_map_consistent(X, Y, gen_images):
            count += 1
    return count


def _algebra_map_consistent(X: SpaceModel, Y: SpaceModel, gen_images):
    """Check a generator assignment extends to an algebra map on the tables."""
    p = X.p
    val = {}
    for d, nm in X.algebra.graded_vs().items():
        gm = X.gen_monomials.get(nm)
        if gm is None:
            return False
        vec = {"1": 1}
        for g, e in gm:
            gv = gen_images[g]
            for _ in range(e):
                vec = _mul_with_unit(Y.algebra, vec, dict(gv, **{}))
        vec.pop("1", None)
        val[nm] = vec
    # operations
    for letter, cols in X.algebra.module.action.items():
        for nm, col in cols.items():
            lhs = {}
            for n2, c in col.items():
                for n3, c2 in val[n2].items():
                    lhs[n3] = (lhs.get(n3, 0) + c * c2) % p
            rhs = Y.algebra.act_word((letter,), val[nm])
            if {k: v for k, v in lhs.items() if v} != {k: v for k, v in rhs.items() if v}:
                return False
    # products on table pairs
    for (a, b), col in X.algebra.products.items():
        lhs = {}
        for n2, c in col.items():
            for n3, c2 in val[n2].items():
                lhs[n3] = (lhs.get(n3, 0) + c * c2) % p
        rhs = Y.algebra.mul(val[a], val[b])
        if {k: v for k, v in lhs.items() if v} != {k: v for k, v in rhs.items() if v}:
            return False
    return True


def _mul_with_unit(alg, v1, v2):
    out = {}
    for a, c1 in v1.items():
        for b, c2 in v2.items():
            if a == "1":
                out[b] = (out.get(b, 0) + c1 * c2) % alg.p
            elif b == "1":
                out[a] = (out.get(a, 0) + c1 * c2) % alg.p
            else:
                for n, c in alg.mul_names(a, b).items():
                    out[n] = (out.get(n, 0) + c1 * c2 * c) % alg.p
    return {k: v for k, v in out.items() if v}


# ---------------------------------------------------------------------------
# chart emission
# ---------------------------------------------------------------------------

def chart_emit(chart: Chart, fmt):
    """Deterministic serialization: json, svg (x = t-s, y = s), or ascii."""
    if fmt == "json":
        return _chart_json(chart)
    if fmt == "svg":
        return _chart_svg(chart)
    if fmt == "ascii":
        return _chart_ascii(chart)
    raise ValueError(f"unknown chart format {fmt!r}")


def _chart_json(chart: Chart):
    doc = {
        "p": chart.p,
        "kind": chart.kind,
        "window": {"s_max": chart.s_max, "t_max": chart.t_max},
        "D": chart.D,
    }
    if chart.tower_level is not None:
        doc["tower_level"] = chart.tower_level
    entries = []
    for (s, t) in sorted(chart.entries):
        dim = chart.entries[(s, t)]
        if (s, t) == (0, 0):
            e = {"s": 0, "t": 0, "dim": dim, "fringe": True}
            if chart.fringe_set_size is not None:
                e["set_size"] = chart.fringe_set_size
            entries.append(e)
        elif dim:
            entries.append({"s": s, "t": t, "dim": dim})
    doc["entries"] = entries
    return (json.dumps(doc, separators=(",", ":")) + "\n").encode()


def chart_from_json(data):
    doc = json.loads(data)
    entries = {}
    set_size = None
    for e in doc["entries"]:
        entries[(e["s"], e["t"])] = e["dim"]
        if e.get("fringe"):
            set_size = e.get("set_size")
    return Chart(
        doc["p"], doc["kind"], doc["window"]["s_max"], doc["window"]["t_max"],
        doc["D"], entries, fringe_set_size=set_size,
        tower_level=doc.get("tower_level"),
    )


def _chart_svg(chart: Chart):
    cell = 28
    pad = 40
    width = pad * 2 + cell * (chart.t_max + 1)
    height = pad * 2 + cell * (chart.s_max + 1)
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    for x in range(chart.t_max + 2):
        px = pad + x * cell
        lines.append(
            f'<line x1="{px}" y1="{pad}" x2="{px}" y2="{height - pad}" '
            f'stroke="#ddd" stroke-width="1"/>'
        )
    for y in range(chart.s_max + 2):
        py = pad + y * cell
        lines.append(
            f'<line x1="{pad}" y1="{py}" x2="{width - pad}" y2="{py}" '
            f'stroke="#ddd" stroke-width="1"/>'
        )
    for (s, t) in sorted(chart.entries):
        dim = chart.entries[(s, t)]
        if not dim:
            continue
        x = t - s
        if x < 0 or x > chart.t_max or s > chart.s_max:
            continue
        px = pad + x * cell + cell // 2
        py = height - pad - s * cell - cell // 2
        lines.append(f'<circle cx="{px}" cy="{py}" r="4" fill="black"/>')
        if dim > 1:
            lines.append(
                f'<text x="{px + 6}" y="{py - 6}" font-size="10" '
                f'font-family="monospace">{dim}</text>'
            )
    lines.append(
        f'<text x="{pad}" y="{height - 8}" font-size="11" font-family="monospace">'
        f"{chart.kind} p={chart.p} (x = t-s, y = s)</text>"
    )
    lines.append("</svg>")
    return ("\n".join(lines) + "\n").encode()


def _chart_ascii(chart: Chart):
    rows = []
    header = "s\\(t-s) " + " ".join(f"{x:3d}" for x in range(0, chart.t_max + 1))
    rows.append(header)
    for s in range(chart.s_max, -1, -1):
        cells = []
        for x in range(0, chart.t_max + 1):
            dim = chart.entries.get((s, x + s), 0)
            cells.append(f"{dim:3d}" if dim else "  .")
        rows.append(f"{s:7d} " + " ".join(cells))
    return ("\n".join(rows) + "\n").encode()
