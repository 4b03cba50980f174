//! Shared backtracking engine for annular enumeration.
//!
//! Builds permutations of `[n]` by assigning images in position order,
//! tracking three quantities incrementally: closed cycles of π, closed
//! cycles of ρ = π⁻¹γ, and the classes of π∨γ. Two prunes keep the search
//! away from hopeless branches:
//!
//!  * genus: closed cycles are permanent, so once `#π + #ρ` is guaranteed
//!    to exceed `n + 2 + 2·g_max − #γ` the branch is dead;
//!  * connectivity: each remaining assignment merges at most one pair of
//!    π∨γ classes and the final partition may be short of `1_n` by at most
//!    `g_max` coarsening merges.
//!
//! At a leaf the engine enumerates the coarsenings `V` of the cycle
//! partition with exactly `g` merges (where `2g = #π + #ρ + #γ − n − 2`)
//! that connect all circles, and hands `(cycles, merge groups)` to the
//! callback. With `g_max = 0` this is exactly the enumeration of
//! S_NC(m₁,…,m_r) in lexicographic image order.

use crate::perm::GammaShape;

pub(crate) struct Config<'a> {
    pub shape: &'a GammaShape,
    /// class id per position; cycles may only mix positions of one class
    pub class_of: Vec<u32>,
    /// classes whose cycles may be joined into marked blocks
    pub mergeable: Vec<bool>,
    /// positions whose cycles must be 2-cycles chosen via `pair_ok`
    pub pair_forced: Vec<bool>,
    pub pair_ok: Option<Box<dyn Fn(usize, usize) -> bool + 'a>>,
    /// largest number of coarsening merges (r−1 for full PS_NC, 0 for S_NC)
    pub g_max: u32,
    /// 0-based positions that ρ = π⁻¹γ must separate
    pub markers: Option<Vec<usize>>,
}

impl<'a> Config<'a> {
    pub fn plain(shape: &'a GammaShape, g_max: u32) -> Self {
        let n = shape.total() as usize;
        Config {
            shape,
            class_of: vec![0; n],
            mergeable: vec![true],
            pair_forced: vec![false; n],
            pair_ok: None,
            g_max,
            markers: None,
        }
    }
}

/// A completed assignment handed to the leaf callback.
pub(crate) struct Leaf<'a> {
    /// 0-based image table of π
    pub image: &'a [usize],
    /// cycles of π, 0-based, each from its least element, sorted by least element
    pub cycles: &'a [Vec<usize>],
    /// groups of cycle indices joined into marked blocks (empty for V = 0_π)
    pub merges: &'a [Vec<usize>],
}

struct Undo {
    closed_pi: bool,
    closed_rho: bool,
    pi_head_tail: Option<(usize, usize)>,
    rho_head_tail: Option<(usize, usize, usize)>,
    dsu: bool,
}

pub(crate) struct Engine<'a> {
    cfg: Config<'a>,
    n: usize,
    gamma: Vec<usize>,
    gamma_inv: Vec<usize>,
    gamma_cycles: usize,
    img: Vec<usize>,
    inv: Vec<usize>,
    assigned: usize,
    /// head of the maximal π-path whose tail is the index, and vice versa;
    /// entries are only meaningful at current path endpoints
    pi_head: Vec<usize>,
    pi_tail: Vec<usize>,
    rho_head: Vec<usize>,
    rho_tail: Vec<usize>,
    closed_pi: usize,
    closed_rho: usize,
    // union by size, no path compression: rollback needs stable parents
    parent: Vec<usize>,
    dsu_size: Vec<usize>,
    n_classes: usize,
    dsu_log: Vec<usize>,
}

const UNSET: usize = usize::MAX;

impl<'a> Engine<'a> {
    pub fn new(cfg: Config<'a>) -> Self {
        let n = cfg.shape.total() as usize;
        let gperm = cfg.shape.gamma();
        let gamma: Vec<usize> = gperm.image_internal().to_vec();
        let mut gamma_inv = vec![0; n];
        for (i, &j) in gamma.iter().enumerate() {
            gamma_inv[j] = i;
        }
        let mut engine = Engine {
            n,
            gamma_cycles: cfg.shape.circles(),
            cfg,
            gamma: gamma.clone(),
            gamma_inv,
            img: vec![UNSET; n],
            inv: vec![UNSET; n],
            assigned: 0,
            pi_head: (0..n).collect(),
            pi_tail: (0..n).collect(),
            rho_head: (0..n).collect(),
            rho_tail: (0..n).collect(),
            closed_pi: 0,
            closed_rho: 0,
            parent: (0..n).collect(),
            dsu_size: vec![1; n],
            n_classes: n,
            dsu_log: Vec::new(),
        };
        for (i, &j) in gamma.iter().enumerate() {
            engine.union(i, j);
        }
        engine.dsu_log.clear();
        engine
    }

    fn root(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.root(a), self.root(b));
        if ra == rb {
            return false;
        }
        let (big, small) = if self.dsu_size[ra] >= self.dsu_size[rb] { (ra, rb) } else { (rb, ra) };
        self.parent[small] = big;
        self.dsu_size[big] += self.dsu_size[small];
        self.n_classes -= 1;
        self.dsu_log.push(small);
        true
    }

    fn undo_union(&mut self) {
        let small = self.dsu_log.pop().expect("dsu log underflow");
        let big = self.parent[small];
        self.parent[small] = small;
        self.dsu_size[big] -= self.dsu_size[small];
        self.n_classes += 1;
    }

    fn push_edge(&mut self, x: usize, y: usize) -> Undo {
        debug_assert!(self.img[x] == UNSET && self.inv[y] == UNSET);
        self.img[x] = y;
        self.inv[y] = x;
        self.assigned += 1;
        let mut undo = Undo {
            closed_pi: false,
            closed_rho: false,
            pi_head_tail: None,
            rho_head_tail: None,
            dsu: false,
        };
        // π path: x is a tail, y is a head
        let h = self.pi_head[x];
        if h == y {
            self.closed_pi += 1;
            undo.closed_pi = true;
        } else {
            let t = self.pi_tail[y];
            self.pi_head[t] = h;
            self.pi_tail[h] = t;
            undo.pi_head_tail = Some((t, h));
        }
        // ρ edge z → x with z = γ⁻¹(y): z is a ρ-tail, x is a ρ-head
        let z = self.gamma_inv[y];
        let hz = self.rho_head[z];
        if hz == x {
            self.closed_rho += 1;
            undo.closed_rho = true;
        } else {
            let tx = self.rho_tail[x];
            self.rho_head[tx] = hz;
            self.rho_tail[hz] = tx;
            undo.rho_head_tail = Some((tx, hz, z));
        }
        undo.dsu = self.union(x, y);
        undo
    }

    fn pop_edge(&mut self, x: usize, y: usize, undo: Undo) {
        if undo.dsu {
            self.undo_union();
        }
        if let Some((tx, hz, z)) = undo.rho_head_tail {
            self.rho_head[tx] = x;
            self.rho_tail[hz] = z;
        }
        if undo.closed_rho {
            self.closed_rho -= 1;
        }
        if let Some((t, h)) = undo.pi_head_tail {
            self.pi_head[t] = y;
            self.pi_tail[h] = x;
        }
        if undo.closed_pi {
            self.closed_pi -= 1;
        }
        self.img[x] = UNSET;
        self.inv[y] = UNSET;
        self.assigned -= 1;
    }

    fn pruned(&self) -> bool {
        let u = self.n - self.assigned;
        let open = if u > 0 { 2 } else { 0 };
        let bound = self.n as i64 + 2 + 2 * self.cfg.g_max as i64 - self.gamma_cycles as i64;
        if (self.closed_pi + self.closed_rho + open) as i64 > bound {
            return true;
        }
        self.n_classes > u + 1 + self.cfg.g_max as usize
    }

    pub fn run(&mut self, f: &mut dyn FnMut(Leaf<'_>)) {
        if self.n == 0 {
            return;
        }
        self.descend(0, f);
    }

    fn descend(&mut self, from: usize, f: &mut dyn FnMut(Leaf<'_>)) {
        if self.assigned == self.n {
            self.leaf(f);
            return;
        }
        let mut x = from;
        while self.img[x] != UNSET {
            x += 1;
        }
        let forced = self.cfg.pair_forced[x];
        for y in 0..self.n {
            if self.inv[y] != UNSET || self.cfg.class_of[y] != self.cfg.class_of[x] {
                continue;
            }
            if forced {
                if y == x || self.img[y] != UNSET {
                    continue;
                }
                if let Some(ok) = &self.cfg.pair_ok {
                    if !ok(x, y) {
                        continue;
                    }
                }
                let u1 = self.push_edge(x, y);
                let u2 = self.push_edge(y, x);
                if !self.pruned() {
                    self.descend(x + 1, f);
                }
                self.pop_edge(y, x, u2);
                self.pop_edge(x, y, u1);
            } else {
                let undo = self.push_edge(x, y);
                if !self.pruned() {
                    self.descend(x + 1, f);
                }
                self.pop_edge(x, y, undo);
            }
        }
    }

    fn leaf(&mut self, f: &mut dyn FnMut(Leaf<'_>)) {
        let sum = self.closed_pi + self.closed_rho + self.gamma_cycles;
        if sum < self.n + 2 {
            return;
        }
        debug_assert!((sum - self.n - 2).is_multiple_of(2), "cycle parity violated");
        let g = ((sum - self.n - 2) / 2) as u32;
        if g > self.cfg.g_max {
            return;
        }
        if let Some(markers) = &self.cfg.markers {
            if !self.rho_separates(markers) {
                return;
            }
        }
        let mut seen = vec![false; self.n];
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            let mut c = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                c.push(i);
                i = self.img[i];
            }
            cycles.push(c);
        }
        let roots: Vec<usize> = cycles.iter().map(|c| self.root(c[0])).collect();
        let classes: Vec<u32> = cycles.iter().map(|c| self.cfg.class_of[c[0]]).collect();
        let can_merge: Vec<bool> =
            classes.iter().map(|&c| self.cfg.mergeable[c as usize]).collect();
        let k = cycles.len();
        let base = self.n_classes;
        match g {
            0 => {
                if base == 1 {
                    f(Leaf { image: &self.img, cycles: &cycles, merges: &[] });
                }
            }
            1 => {
                for i in 0..k {
                    for j in i + 1..k {
                        if classes[i] != classes[j] || !can_merge[i] {
                            continue;
                        }
                        if base - usize::from(roots[i] != roots[j]) == 1 {
                            f(Leaf {
                                image: &self.img,
                                cycles: &cycles,
                                merges: &[vec![i, j]],
                            });
                        }
                    }
                }
            }
            2 => {
                for i in 0..k {
                    for j in i + 1..k {
                        for l in j + 1..k {
                            if classes[i] != classes[j]
                                || classes[j] != classes[l]
                                || !can_merge[i]
                            {
                                continue;
                            }
                            let mut rs = [roots[i], roots[j], roots[l]];
                            rs.sort_unstable();
                            let distinct =
                                1 + usize::from(rs[0] != rs[1]) + usize::from(rs[1] != rs[2]);
                            if base - (distinct - 1) == 1 {
                                f(Leaf {
                                    image: &self.img,
                                    cycles: &cycles,
                                    merges: &[vec![i, j, l]],
                                });
                            }
                        }
                    }
                }
                for i in 0..k {
                    for j in i + 1..k {
                        if classes[i] != classes[j] || !can_merge[i] {
                            continue;
                        }
                        for p in i..k {
                            for q in p + 1..k {
                                if (p, q) <= (i, j)
                                    || p == i
                                    || p == j
                                    || q == i
                                    || q == j
                                    || classes[p] != classes[q]
                                    || !can_merge[p]
                                {
                                    continue;
                                }
                                if classes_after_two(
                                    base,
                                    (roots[i], roots[j]),
                                    (roots[p], roots[q]),
                                ) == 1
                                {
                                    f(Leaf {
                                        image: &self.img,
                                        cycles: &cycles,
                                        merges: &[vec![i, j], vec![p, q]],
                                    });
                                }
                            }
                        }
                    }
                }
            }
            _ => {}
        }
    }

    fn rho_separates(&self, markers: &[usize]) -> bool {
        let mut is_marker = vec![false; self.n];
        for &m in markers {
            is_marker[m] = true;
        }
        let mut seen = vec![false; self.n];
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            let mut hits = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                if is_marker[i] {
                    hits += 1;
                    if hits > 1 {
                        return false;
                    }
                }
                i = self.inv[self.gamma[i]];
            }
        }
        true
    }
}

/// Classes left after merging two pairs of roots on top of `base` classes.
fn classes_after_two(base: usize, a: (usize, usize), b: (usize, usize)) -> usize {
    let mut merged = base;
    if a.0 != a.1 {
        merged -= 1;
    }
    let norm = |r: usize| if r == a.1 { a.0 } else { r };
    if norm(b.0) != norm(b.1) {
        merged -= 1;
    }
    merged
}
