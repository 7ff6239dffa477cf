//! Exact maximum-weight matching on general graphs (Edmonds' blossom
//! algorithm with dual variables, O(n^3)), plus the minimum-weight perfect
//! matching wrapper used by the decoder.
//!
//! The structure follows Van Rantwijk's well-known formulation: vertices
//! `0..n`, blossoms `n..2n`, edge endpoints `2k` and `2k+1`. All arithmetic
//! is on integers; vertex duals are kept at twice the usual scale so that
//! every slack stays integral.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeightedEdge {
    pub u: usize,
    pub v: usize,
    pub weight: i64,
}

const NONE: usize = usize::MAX;

struct Blossom<'a> {
    n: usize,
    edges: &'a [WeightedEdge],
    endpoint: Vec<usize>,
    neighbend: Vec<Vec<usize>>,
    mate: Vec<usize>,
    label: Vec<u8>,
    labelend: Vec<usize>,
    inblossom: Vec<usize>,
    blossomparent: Vec<usize>,
    blossomchilds: Vec<Vec<usize>>,
    blossombase: Vec<usize>,
    blossomendps: Vec<Vec<usize>>,
    bestedge: Vec<usize>,
    blossombestedges: Vec<Option<Vec<usize>>>,
    unusedblossoms: Vec<usize>,
    dualvar: Vec<i64>,
    allowedge: Vec<bool>,
    queue: Vec<usize>,
}

fn wrap(j: isize, len: usize) -> usize {
    j.rem_euclid(len as isize) as usize
}

impl<'a> Blossom<'a> {
    fn new(n: usize, edges: &'a [WeightedEdge]) -> Self {
        let maxweight = edges.iter().map(|e| e.weight).max().unwrap_or(0).max(0);
        let mut endpoint = Vec::with_capacity(2 * edges.len());
        let mut neighbend = vec![Vec::new(); n];
        for (k, e) in edges.iter().enumerate() {
            endpoint.push(e.u);
            endpoint.push(e.v);
            neighbend[e.u].push(2 * k + 1);
            neighbend[e.v].push(2 * k);
        }
        let mut dualvar = vec![maxweight; n];
        dualvar.extend(std::iter::repeat_n(0, n));
        Self {
            n,
            edges,
            endpoint,
            neighbend,
            mate: vec![NONE; n],
            label: vec![0; 2 * n],
            labelend: vec![NONE; 2 * n],
            inblossom: (0..n).collect(),
            blossomparent: vec![NONE; 2 * n],
            blossomchilds: vec![Vec::new(); 2 * n],
            blossombase: (0..n).chain(std::iter::repeat_n(NONE, n)).collect(),
            blossomendps: vec![Vec::new(); 2 * n],
            bestedge: vec![NONE; 2 * n],
            blossombestedges: vec![None; 2 * n],
            unusedblossoms: (n..2 * n).collect(),
            dualvar,
            allowedge: vec![false; edges.len()],
            queue: Vec::new(),
        }
    }

    fn slack(&self, k: usize) -> i64 {
        let e = self.edges[k];
        self.dualvar[e.u] + self.dualvar[e.v] - 2 * e.weight
    }

    fn leaves(&self, b: usize, out: &mut Vec<usize>) {
        if b < self.n {
            out.push(b);
        } else {
            for &t in &self.blossomchilds[b] {
                self.leaves(t, out);
            }
        }
    }

    fn leaves_of(&self, b: usize) -> Vec<usize> {
        let mut v = Vec::new();
        self.leaves(b, &mut v);
        v
    }

    fn assign_label(&mut self, w: usize, t: u8, p: usize) {
        let b = self.inblossom[w];
        debug_assert!(self.label[w] == 0 && self.label[b] == 0);
        self.label[w] = t;
        self.label[b] = t;
        self.labelend[w] = p;
        self.labelend[b] = p;
        self.bestedge[w] = NONE;
        self.bestedge[b] = NONE;
        if t == 1 {
            let l = self.leaves_of(b);
            self.queue.extend(l);
        } else if t == 2 {
            let base = self.blossombase[b];
            let mb = self.mate[base];
            debug_assert!(mb != NONE);
            self.assign_label(self.endpoint[mb], 1, mb ^ 1);
        }
    }

    fn scan_blossom(&mut self, mut v: usize, mut w: usize) -> usize {
        let mut path = Vec::new();
        let mut base = NONE;
        while v != NONE || w != NONE {
            let mut b = self.inblossom[v];
            if self.label[b] & 4 != 0 {
                base = self.blossombase[b];
                break;
            }
            path.push(b);
            self.label[b] = 5;
            if self.labelend[b] == NONE {
                v = NONE;
            } else {
                v = self.endpoint[self.labelend[b]];
                b = self.inblossom[v];
                v = self.endpoint[self.labelend[b]];
            }
            if w != NONE {
                std::mem::swap(&mut v, &mut w);
            }
        }
        for b in path {
            self.label[b] = 1;
        }
        base
    }

    fn add_blossom(&mut self, base: usize, k: usize) {
        let (mut v, mut w) = (self.edges[k].u, self.edges[k].v);
        let bb = self.inblossom[base];
        let mut bv = self.inblossom[v];
        let mut bw = self.inblossom[w];
        let b = self.unusedblossoms.pop().expect("blossom slot available");
        self.blossombase[b] = base;
        self.blossomparent[b] = NONE;
        self.blossomparent[bb] = b;
        let mut path = Vec::new();
        let mut endps = Vec::new();
        while bv != bb {
            self.blossomparent[bv] = b;
            path.push(bv);
            endps.push(self.labelend[bv]);
            v = self.endpoint[self.labelend[bv]];
            bv = self.inblossom[v];
        }
        path.push(bb);
        path.reverse();
        endps.reverse();
        endps.push(2 * k);
        while bw != bb {
            self.blossomparent[bw] = b;
            path.push(bw);
            endps.push(self.labelend[bw] ^ 1);
            w = self.endpoint[self.labelend[bw]];
            bw = self.inblossom[w];
        }
        self.label[b] = 1;
        self.labelend[b] = self.labelend[bb];
        self.dualvar[b] = 0;
        self.blossomchilds[b] = path.clone();
        self.blossomendps[b] = endps;
        for lv in self.leaves_of(b) {
            if self.label[self.inblossom[lv]] == 2 {
                self.queue.push(lv);
            }
            self.inblossom[lv] = b;
        }
        let mut bestedgeto = vec![NONE; 2 * self.n];
        for &sb in &path {
            let nblists: Vec<Vec<usize>> = match self.blossombestedges[sb].take() {
                Some(list) => vec![list],
                None => self
                    .leaves_of(sb)
                    .into_iter()
                    .map(|lv| self.neighbend[lv].iter().map(|p| p / 2).collect())
                    .collect(),
            };
            for nblist in nblists {
                for k2 in nblist {
                    let (mut i, mut j) = (self.edges[k2].u, self.edges[k2].v);
                    if self.inblossom[j] == b {
                        std::mem::swap(&mut i, &mut j);
                    }
                    let _ = i;
                    let bj = self.inblossom[j];
                    if bj != b
                        && self.label[bj] == 1
                        && (bestedgeto[bj] == NONE || self.slack(k2) < self.slack(bestedgeto[bj]))
                    {
                        bestedgeto[bj] = k2;
                    }
                }
            }
            self.bestedge[sb] = NONE;
        }
        let list: Vec<usize> = bestedgeto.into_iter().filter(|&k2| k2 != NONE).collect();
        let mut best = NONE;
        for &k2 in &list {
            if best == NONE || self.slack(k2) < self.slack(best) {
                best = k2;
            }
        }
        self.blossombestedges[b] = Some(list);
        self.bestedge[b] = best;
    }

    fn expand_blossom(&mut self, b: usize, endstage: bool) {
        let childs = self.blossomchilds[b].clone();
        for &s in &childs {
            self.blossomparent[s] = NONE;
            if s < self.n {
                self.inblossom[s] = s;
            } else if endstage && self.dualvar[s] == 0 {
                self.expand_blossom(s, endstage);
            } else {
                for lv in self.leaves_of(s) {
                    self.inblossom[lv] = s;
                }
            }
        }
        if !endstage && self.label[b] == 2 {
            let len = childs.len();
            let endps = self.blossomendps[b].clone();
            let entrychild = self.inblossom[self.endpoint[self.labelend[b] ^ 1]];
            let mut j = childs.iter().position(|&c| c == entrychild).expect("entry child") as isize;
            let (jstep, endptrick): (isize, usize) = if j & 1 == 1 {
                j -= len as isize;
                (1, 0)
            } else {
                (-1, 1)
            };
            let mut p = self.labelend[b];
            while j != 0 {
                self.label[self.endpoint[p ^ 1]] = 0;
                let q = endps[wrap(j - endptrick as isize, len)];
                self.label[self.endpoint[q ^ endptrick ^ 1]] = 0;
                self.assign_label(self.endpoint[p ^ 1], 2, p);
                self.allowedge[q / 2] = true;
                j += jstep;
                p = endps[wrap(j - endptrick as isize, len)] ^ endptrick;
                self.allowedge[p / 2] = true;
                j += jstep;
            }
            let bv = childs[wrap(j, len)];
            let ep = self.endpoint[p ^ 1];
            self.label[ep] = 2;
            self.label[bv] = 2;
            self.labelend[ep] = p;
            self.labelend[bv] = p;
            self.bestedge[bv] = NONE;
            j += jstep;
            while childs[wrap(j, len)] != entrychild {
                let bv = childs[wrap(j, len)];
                if self.label[bv] == 1 {
                    j += jstep;
                    continue;
                }
                let found = self.leaves_of(bv).into_iter().find(|&lv| self.label[lv] != 0);
                if let Some(lv) = found {
                    self.label[lv] = 0;
                    let m = self.mate[self.blossombase[bv]];
                    self.label[self.endpoint[m]] = 0;
                    let le = self.labelend[lv];
                    self.assign_label(lv, 2, le);
                }
                j += jstep;
            }
        }
        self.label[b] = 0;
        self.labelend[b] = NONE;
        self.blossomchilds[b].clear();
        self.blossomendps[b].clear();
        self.blossombase[b] = NONE;
        self.blossombestedges[b] = None;
        self.bestedge[b] = NONE;
        self.unusedblossoms.push(b);
    }

    fn augment_blossom(&mut self, b: usize, v: usize) {
        let mut t = v;
        while self.blossomparent[t] != b {
            t = self.blossomparent[t];
        }
        if t >= self.n {
            self.augment_blossom(t, v);
        }
        let len = self.blossomchilds[b].len();
        let i = self.blossomchilds[b].iter().position(|&c| c == t).expect("child") as isize;
        let mut j = i;
        let (jstep, endptrick): (isize, usize) = if i & 1 == 1 {
            j -= len as isize;
            (1, 0)
        } else {
            (-1, 1)
        };
        while j != 0 {
            j += jstep;
            let t1 = self.blossomchilds[b][wrap(j, len)];
            let p = self.blossomendps[b][wrap(j - endptrick as isize, len)] ^ endptrick;
            if t1 >= self.n {
                self.augment_blossom(t1, self.endpoint[p]);
            }
            j += jstep;
            let t2 = self.blossomchilds[b][wrap(j, len)];
            if t2 >= self.n {
                self.augment_blossom(t2, self.endpoint[p ^ 1]);
            }
            self.mate[self.endpoint[p]] = p ^ 1;
            self.mate[self.endpoint[p ^ 1]] = p;
        }
        let i = i as usize;
        self.blossomchilds[b].rotate_left(i);
        self.blossomendps[b].rotate_left(i);
        self.blossombase[b] = self.blossombase[self.blossomchilds[b][0]];
        debug_assert_eq!(self.blossombase[b], v);
    }

    fn augment_matching(&mut self, k: usize) {
        let (v, w) = (self.edges[k].u, self.edges[k].v);
        for (mut s, mut p) in [(v, 2 * k + 1), (w, 2 * k)] {
            loop {
                let bs = self.inblossom[s];
                if bs >= self.n {
                    self.augment_blossom(bs, s);
                }
                self.mate[s] = p;
                if self.labelend[bs] == NONE {
                    break;
                }
                let t = self.endpoint[self.labelend[bs]];
                let bt = self.inblossom[t];
                s = self.endpoint[self.labelend[bt]];
                let j = self.endpoint[self.labelend[bt] ^ 1];
                if bt >= self.n {
                    self.augment_blossom(bt, j);
                }
                self.mate[j] = self.labelend[bt];
                p = self.labelend[bt] ^ 1;
            }
        }
    }

    fn solve(&mut self, max_cardinality: bool) {
        let n = self.n;
        for _ in 0..n {
            self.label.iter_mut().for_each(|l| *l = 0);
            self.bestedge.iter_mut().for_each(|b| *b = NONE);
            for b in n..2 * n {
                self.blossombestedges[b] = None;
            }
            self.allowedge.iter_mut().for_each(|a| *a = false);
            self.queue.clear();
            for v in 0..n {
                if self.mate[v] == NONE && self.label[self.inblossom[v]] == 0 {
                    self.assign_label(v, 1, NONE);
                }
            }
            let mut augmented = false;
            loop {
                while let Some(v) = self.queue.pop() {
                    if augmented {
                        break;
                    }
                    let nb = self.neighbend[v].clone();
                    for p in nb {
                        let k = p / 2;
                        let w = self.endpoint[p];
                        if self.inblossom[v] == self.inblossom[w] {
                            continue;
                        }
                        let mut kslack = 0;
                        if !self.allowedge[k] {
                            kslack = self.slack(k);
                            if kslack <= 0 {
                                self.allowedge[k] = true;
                            }
                        }
                        if self.allowedge[k] {
                            if self.label[self.inblossom[w]] == 0 {
                                self.assign_label(w, 2, p ^ 1);
                            } else if self.label[self.inblossom[w]] == 1 {
                                let base = self.scan_blossom(v, w);
                                if base != NONE {
                                    self.add_blossom(base, k);
                                } else {
                                    self.augment_matching(k);
                                    augmented = true;
                                    break;
                                }
                            } else if self.label[w] == 0 {
                                self.label[w] = 2;
                                self.labelend[w] = p ^ 1;
                            }
                        } else if self.label[self.inblossom[w]] == 1 {
                            let b = self.inblossom[v];
                            if self.bestedge[b] == NONE || kslack < self.slack(self.bestedge[b]) {
                                self.bestedge[b] = k;
                            }
                        } else if self.label[w] == 0
                            && (self.bestedge[w] == NONE || kslack < self.slack(self.bestedge[w]))
                        {
                            self.bestedge[w] = k;
                        }
                    }
                }
                if augmented {
                    break;
                }
                let mut deltatype = 0u8;
                let mut delta = 0i64;
                let mut deltaedge = NONE;
                let mut deltablossom = NONE;
                if !max_cardinality {
                    deltatype = 1;
                    delta = *self.dualvar[..n].iter().min().unwrap_or(&0);
                }
                for v in 0..n {
                    if self.label[self.inblossom[v]] == 0 && self.bestedge[v] != NONE {
                        let d = self.slack(self.bestedge[v]);
                        if deltatype == 0 || d < delta {
                            delta = d;
                            deltatype = 2;
                            deltaedge = self.bestedge[v];
                        }
                    }
                }
                for b in 0..2 * n {
                    if self.blossomparent[b] == NONE && self.label[b] == 1 && self.bestedge[b] != NONE {
                        let ks = self.slack(self.bestedge[b]);
                        debug_assert_eq!(ks % 2, 0);
                        let d = ks / 2;
                        if deltatype == 0 || d < delta {
                            delta = d;
                            deltatype = 3;
                            deltaedge = self.bestedge[b];
                        }
                    }
                }
                for b in n..2 * n {
                    if self.blossombase[b] != NONE
                        && self.blossomparent[b] == NONE
                        && self.label[b] == 2
                        && (deltatype == 0 || self.dualvar[b] < delta)
                    {
                        delta = self.dualvar[b];
                        deltatype = 4;
                        deltablossom = b;
                    }
                }
                if deltatype == 0 {
                    deltatype = 1;
                    delta = (*self.dualvar[..n].iter().min().unwrap_or(&0)).max(0);
                }
                for v in 0..n {
                    match self.label[self.inblossom[v]] {
                        1 => self.dualvar[v] -= delta,
                        2 => self.dualvar[v] += delta,
                        _ => {}
                    }
                }
                for b in n..2 * n {
                    if self.blossombase[b] != NONE && self.blossomparent[b] == NONE {
                        match self.label[b] {
                            1 => self.dualvar[b] += delta,
                            2 => self.dualvar[b] -= delta,
                            _ => {}
                        }
                    }
                }
                match deltatype {
                    1 => break,
                    2 => {
                        self.allowedge[deltaedge] = true;
                        let (mut i, j) = (self.edges[deltaedge].u, self.edges[deltaedge].v);
                        if self.label[self.inblossom[i]] == 0 {
                            i = j;
                        }
                        self.queue.push(i);
                    }
                    3 => {
                        self.allowedge[deltaedge] = true;
                        self.queue.push(self.edges[deltaedge].u);
                    }
                    _ => self.expand_blossom(deltablossom, false),
                }
            }
            if !augmented {
                break;
            }
            for b in n..2 * n {
                if self.blossomparent[b] == NONE
                    && self.blossombase[b] != NONE
                    && self.label[b] == 1
                    && self.dualvar[b] == 0
                {
                    self.expand_blossom(b, true);
                }
            }
        }
    }
}

/// Maximum-weight matching of an undirected graph on vertices `0..n`.
/// With `max_cardinality`, the maximum weight among maximum-cardinality
/// matchings. Returns the partner of each vertex.
pub fn max_weight_matching(n: usize, edges: &[WeightedEdge], max_cardinality: bool) -> Vec<Option<usize>> {
    if edges.is_empty() {
        return vec![None; n];
    }
    let mut s = Blossom::new(n, edges);
    s.solve(max_cardinality);
    s.mate.iter().map(|&p| (p != NONE).then(|| s.endpoint[p])).collect()
}

/// Minimum-cost perfect matching; `None` if no perfect matching exists.
/// Costs must be non-negative.
pub fn min_weight_perfect_matching(n: usize, edges: &[WeightedEdge]) -> Option<Vec<usize>> {
    let top = edges.iter().map(|e| e.weight).max().unwrap_or(0) + 1;
    let flipped: Vec<WeightedEdge> = edges
        .iter()
        .map(|e| WeightedEdge {
            weight: top - e.weight,
            ..*e
        })
        .collect();
    let m = max_weight_matching(n, &flipped, true);
    m.into_iter().collect()
}

/// Total weight of the edges used by a matching (each pair counted once,
/// cheapest parallel edge).
pub fn matching_weight(edges: &[WeightedEdge], mate: &[Option<usize>]) -> i64 {
    let mut total = 0;
    for (u, m) in mate.iter().enumerate() {
        if let Some(v) = *m {
            if u < v {
                total += edges
                    .iter()
                    .filter(|e| (e.u == u && e.v == v) || (e.u == v && e.v == u))
                    .map(|e| e.weight)
                    .max()
                    .expect("matched pair is an edge");
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn e(u: usize, v: usize, weight: i64) -> WeightedEdge {
        WeightedEdge { u, v, weight }
    }

    /// Exhaustive best matching weight (max or max-cardinality).
    fn brute(n: usize, edges: &[WeightedEdge], maxcard: bool) -> (usize, i64) {
        let mut w = vec![vec![None; n]; n];
        for ed in edges {
            let cur: Option<i64> = w[ed.u][ed.v];
            if cur.is_none_or(|c| ed.weight > c) {
                w[ed.u][ed.v] = Some(ed.weight);
                w[ed.v][ed.u] = Some(ed.weight);
            }
        }
        fn rec(i: usize, used: &mut Vec<bool>, w: &[Vec<Option<i64>>], maxcard: bool) -> (usize, i64) {
            let n = used.len();
            let Some(u) = (i..n).find(|&u| !used[u]) else {
                return (0, 0);
            };
            used[u] = true;
            let mut best = rec(u + 1, used, w, maxcard);
            for v in u + 1..n {
                if !used[v] {
                    if let Some(x) = w[u][v] {
                        used[v] = true;
                        let (c, s) = rec(u + 1, used, w, maxcard);
                        used[v] = false;
                        let cand = (c + 1, s + x);
                        let better = if maxcard {
                            cand.0 > best.0 || (cand.0 == best.0 && cand.1 > best.1)
                        } else {
                            cand.1 > best.1
                        };
                        if better {
                            best = cand;
                        }
                    }
                }
            }
            used[u] = false;
            best
        }
        rec(0, &mut vec![false; n], &w, maxcard)
    }

    fn check(n: usize, edges: &[WeightedEdge], maxcard: bool) {
        let m = max_weight_matching(n, edges, maxcard);
        for (u, p) in m.iter().enumerate() {
            if let Some(v) = *p {
                assert_eq!(m[v], Some(u));
            }
        }
        let card = m.iter().filter(|p| p.is_some()).count() / 2;
        let (bc, bw) = brute(n, edges, maxcard);
        assert_eq!(matching_weight(edges, &m), bw, "{edges:?}");
        if maxcard {
            assert_eq!(card, bc);
        }
    }

    #[test]
    fn small_cases() {
        check(2, &[e(0, 1, 1)], false);
        check(3, &[e(0, 1, 10), e(1, 2, 11)], false);
        check(4, &[e(0, 1, 5), e(1, 2, 11), e(2, 3, 5)], false);
        check(4, &[e(0, 1, 5), e(1, 2, 11), e(2, 3, 5)], true);
        // Odd cycle forces a blossom.
        check(4, &[e(0, 1, 9), e(0, 2, 9), e(1, 2, 10), e(1, 3, 8), e(2, 3, 7)], false);
        check(
            6,
            &[e(0, 1, 9), e(0, 2, 8), e(1, 2, 10), e(0, 3, 5), e(3, 4, 4), e(0, 5, 3)],
            false,
        );
        // Nested blossoms and a blossom that must be relabeled.
        check(
            8,
            &[
                e(0, 1, 45),
                e(0, 4, 45),
                e(1, 2, 50),
                e(2, 3, 45),
                e(3, 4, 50),
                e(0, 5, 30),
                e(2, 7, 35),
                e(3, 7, 26),
                e(4, 6, 5),
            ],
            false,
        );
        check(
            10,
            &[
                e(0, 1, 45),
                e(0, 6, 45),
                e(1, 2, 50),
                e(2, 3, 45),
                e(3, 4, 45),
                e(4, 5, 95),
                e(3, 6, 50),
                e(0, 7, 30),
                e(2, 9, 35),
                e(4, 8, 36),
                e(6, 9, 26),
            ],
            false,
        );
    }

    #[test]
    fn random_graphs_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for case in 0..600 {
            let n = rng.gen_range(1..=10);
            let density = rng.gen_range(0.2..1.0);
            let maxw = if case % 3 == 0 { 5 } else { 1000 };
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen::<f64>() < density {
                        edges.push(e(u, v, rng.gen_range(0..=maxw)));
                    }
                }
            }
            check(n, &edges, case % 2 == 0);
        }
    }

    #[test]
    fn perfect_matching_minimises_cost() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let n = 2 * rng.gen_range(1..=5);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    edges.push(e(u, v, rng.gen_range(0..100)));
                }
            }
            let m = min_weight_perfect_matching(n, &edges).unwrap();
            let cost: i64 = (0..n)
                .filter(|&u| u < m[u])
                .map(|u| {
                    edges
                        .iter()
                        .find(|x| (x.u == u && x.v == m[u]) || (x.v == u && x.u == m[u]))
                        .unwrap()
                        .weight
                })
                .sum();
            let neg: Vec<WeightedEdge> = edges.iter().map(|x| e(x.u, x.v, -x.weight)).collect();
            let (_, best) = brute(n, &neg, true);
            assert_eq!(cost, -best);
        }
    }

    #[test]
    fn no_perfect_matching_is_reported() {
        assert!(min_weight_perfect_matching(3, &[e(0, 1, 1), e(1, 2, 1)]).is_none());
        assert!(min_weight_perfect_matching(4, &[e(0, 1, 1), e(0, 2, 1), e(0, 3, 1)]).is_none());
    }
}
