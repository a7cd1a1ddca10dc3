//! Step 1: the weighted graph H(φ) of a positive NAE formula.
//!
//! H(φ) has a `τ`-balancing order when φ is NAE-satisfiable, and every
//! `(τ+γ)`-balancing order decodes back into a satisfying assignment.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::{eval_nae, Assignment, NaeFormula};
use crate::wgraph::{check_balancing_order, LinearOrder, Role, WeightedGraph};

/// The `(τ, γ, λ, a, b)` profile behind every gadget weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Constants {
    pub tau: u64,
    pub gamma: u64,
    pub lambda: u64,
    pub a: u64,
    pub b: u64,
}

impl Constants {
    pub const FULL: Constants = Constants { tau: 1080, gamma: 135, lambda: 180, a: 45, b: 7_873_201 };

    pub fn small(b: u64) -> Self {
        Constants { tau: 36, gamma: 3, lambda: 6, a: 3, b }
    }

    /// Structure constants before multiplying every weight by `a`.
    pub fn base(&self) -> Self {
        Constants { tau: self.tau / self.a, gamma: self.gamma / self.a, lambda: self.lambda / self.a, a: 1, b: self.b }
    }

    /// Weight of the edges `s1s2` and `s2s3` of a bottleneck sequence.
    pub fn s_edge_weight(&self) -> u64 {
        (self.tau + self.gamma) / 2 + 1
    }

    /// `⌈(b−1)/(6τ)⌉ − 1`, the sim-value bound under which grouping works.
    pub fn alpha(&self) -> u64 {
        (self.b - 1).div_ceil(6 * self.tau).saturating_sub(1)
    }
}

impl Default for Constants {
    fn default() -> Self {
        Constants::small(3)
    }
}

impl fmt::Display for Constants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "τ={} γ={} λ={} a={} b={}", self.tau, self.gamma, self.lambda, self.a, self.b)
    }
}

/// `full`, `small` or `custom:τ,γ,λ,a,b`.
impl FromStr for Constants {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Constants::FULL),
            "small" => Ok(Constants::small(3)),
            _ => {
                let body = s
                    .strip_prefix("custom:")
                    .ok_or_else(|| Error::invalid(format!("unknown profile {s:?}")))?;
                let nums = body
                    .split(',')
                    .map(|x| x.trim().parse::<u64>().map_err(|_| Error::invalid(format!("bad constant {x:?}"))))
                    .collect::<Result<Vec<_>>>()?;
                let [tau, gamma, lambda, a, b] = nums[..] else {
                    return Err(Error::invalid("custom profile needs five values τ,γ,λ,a,b"));
                };
                Ok(Constants { tau, gamma, lambda, a, b })
            }
        }
    }
}

/// Checks the four inequalities and the divisibility by `a`, naming the first
/// one that fails.
pub fn validate_constants(c: &Constants) -> Result<()> {
    let Constants { tau, gamma, lambda, a, b } = *c;
    let bad = |m: &str| Err(Error::InvalidConstants(m.to_string()));
    if tau == 0 || gamma == 0 || lambda == 0 || a == 0 || b == 0 {
        return bad("all constants must be positive");
    }
    if gamma >= lambda {
        return bad("γ < λ violated");
    }
    if 3 * gamma + 4 >= tau {
        return bad("3γ + 4 < τ violated");
    }
    if 2 * lambda + gamma >= tau {
        return bad("2λ + γ < τ violated");
    }
    if 6 * lambda > tau {
        return bad("6λ ≤ τ violated");
    }
    if tau % a != 0 || gamma % a != 0 || lambda % a != 0 {
        return bad("τ, γ, λ must be multiples of a");
    }
    Ok(())
}

/// The spine, terminals and root of one bottleneck inside a larger graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BottleneckHandle {
    /// `(a_i, b_i)` in spine order.
    pub spine: Vec<(usize, usize)>,
    pub terminals: Vec<usize>,
    pub attachments: Vec<u64>,
    pub root: usize,
}

impl BottleneckHandle {
    /// `a_1, b_1, …, a_k, b_k`.
    pub fn spine_vertices(&self) -> Vec<usize> {
        self.spine.iter().flat_map(|&(a, b)| [a, b]).collect()
    }

    /// A direct order: terminals in the stored order, then the spine.
    pub fn direct_order(&self) -> Vec<usize> {
        let mut out = self.terminals.clone();
        out.extend(self.spine_vertices());
        out
    }
}

/// Adds a `(τ, γ)`-bottleneck on `terminals` (vertex id, attachment weight).
/// Adds `2k` vertices and `3k − 1` edges; the handle is rooted at `b_k`.
pub fn build_bottleneck(
    g: &mut WeightedGraph,
    name: &str,
    terminals: &[(usize, u64)],
    c: &Constants,
) -> Result<BottleneckHandle> {
    build_bottleneck_at(g, name, terminals, c, None)
}

fn build_bottleneck_at(
    g: &mut WeightedGraph,
    name: &str,
    terminals: &[(usize, u64)],
    c: &Constants,
    shared_root: Option<usize>,
) -> Result<BottleneckHandle> {
    let k = terminals.len();
    if k == 0 {
        return Err(Error::invalid(format!("bottleneck {name} has no terminals")));
    }
    let (lo, hi) = (c.gamma + 1, c.tau.saturating_sub(c.gamma + 1));
    for &(v, w) in terminals {
        if v >= g.vertex_count() {
            return Err(Error::UnknownVertex(v));
        }
        if w < lo || w > hi {
            return Err(Error::invalid(format!(
                "attachment weight {w} of vertex {v} outside [{lo}, {hi}] in bottleneck {name}"
            )));
        }
    }
    let mut spine = Vec::with_capacity(k);
    for i in 1..=k {
        let a = g.add_vertex(format!("{name}.a{i}"), Role::SpineA);
        let b = match shared_root {
            Some(r) if i == k => r,
            _ => g.add_vertex(format!("{name}.b{i}"), if i == k { Role::Root } else { Role::SpineB }),
        };
        spine.push((a, b));
    }
    for (i, &(a, b)) in spine.iter().enumerate() {
        g.add_edge(a, b, c.tau)?;
        if i + 1 < k {
            g.add_edge(b, spine[i + 1].0, c.gamma + 1)?;
        }
        let (v, w) = terminals[i];
        g.add_edge(v, a, w)?;
    }
    Ok(BottleneckHandle {
        root: spine[k - 1].1,
        spine,
        terminals: terminals.iter().map(|&(v, _)| v).collect(),
        attachments: terminals.iter().map(|&(_, w)| w).collect(),
    })
}

/// The four bottlenecks, connectors and shared roots of `B(S1, S2, S3)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceHandle {
    pub s: [usize; 3],
    pub sets: [Vec<usize>; 3],
    pub b1_plus: BottleneckHandle,
    pub b2_minus: BottleneckHandle,
    pub b2_plus: BottleneckHandle,
    pub b3_minus: BottleneckHandle,
    pub roots: [usize; 2],
}

impl SequenceHandle {
    /// Every vertex the sequence added, plus the three terminal sets.
    pub fn vertices(&self) -> Vec<usize> {
        let mut out = direct_order_of_sequence(self);
        out.sort_unstable();
        out
    }
}

/// Adds a bottleneck sequence on three disjoint terminal sets. `s_i` is the
/// first terminal of each bottleneck it belongs to, with attachment `γ+1`.
pub fn build_bottleneck_sequence(
    g: &mut WeightedGraph,
    sets: [&[(usize, u64)]; 3],
    c: &Constants,
) -> Result<SequenceHandle> {
    let mut seen = std::collections::HashSet::new();
    for set in sets {
        for &(v, _) in set {
            if v >= g.vertex_count() {
                return Err(Error::UnknownVertex(v));
            }
            if !seen.insert(v) {
                return Err(Error::invalid(format!("vertex {v} belongs to two terminal sets")));
            }
        }
    }
    let s: [usize; 3] = std::array::from_fn(|i| g.add_vertex(format!("s{}", i + 1), Role::STerminal));
    let with_s = |i: usize| -> Vec<(usize, u64)> {
        std::iter::once((s[i], c.gamma + 1)).chain(sets[i].iter().copied()).collect()
    };
    let b1_plus = build_bottleneck_at(g, "B1+", &with_s(0), c, None)?;
    let b2_minus = build_bottleneck_at(g, "B2-", &with_s(1), c, Some(b1_plus.root))?;
    let b2_plus = build_bottleneck_at(g, "B2+", &with_s(1), c, None)?;
    let b3_minus = build_bottleneck_at(g, "B3-", &with_s(2), c, Some(b2_plus.root))?;
    g.add_edge(s[0], s[1], c.s_edge_weight())?;
    g.add_edge(s[1], s[2], c.s_edge_weight())?;
    Ok(SequenceHandle {
        s,
        sets: sets.map(|set| set.iter().map(|&(v, _)| v).collect()),
        roots: [b1_plus.root, b2_plus.root],
        b1_plus,
        b2_minus,
        b2_plus,
        b3_minus,
    })
}

/// Direct order of a bottleneck sequence: `s_i` leads each terminal group,
/// the rest of the group follows in ascending id.
pub fn direct_order_of_sequence(h: &SequenceHandle) -> Vec<usize> {
    let group = |i: usize| -> Vec<usize> {
        let mut rest = h.sets[i].clone();
        rest.sort_unstable();
        std::iter::once(h.s[i]).chain(rest).collect()
    };
    // The reversed spine of a minus bottleneck, without its shared root.
    let reversed_tail = |b: &BottleneckHandle| -> Vec<usize> {
        let mut sp = b.spine_vertices();
        sp.pop();
        sp.reverse();
        sp
    };
    let mut out = group(0);
    out.extend(h.b1_plus.spine_vertices());
    out.extend(reversed_tail(&h.b2_minus));
    out.extend(group(1));
    out.extend(h.b2_plus.spine_vertices());
    out.extend(reversed_tail(&h.b3_minus));
    out.extend(group(2));
    out
}

/// Named vertex groups and provenance of a built H(φ).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HMeta {
    /// Constants the graph answers to (thresholds are stated in these).
    pub constants: Constants,
    /// Every edge weight is a multiple of this; 1 for a direct build.
    pub weight_unit: u64,
    /// Constants the structure was built from, before scaling.
    pub structure: Constants,
    pub formula: NaeFormula,
    pub variables: Vec<usize>,
    pub variable_bars: Vec<usize>,
    pub t: Vec<usize>,
    pub t_bars: Vec<usize>,
    pub f: Vec<usize>,
    pub f_bars: Vec<usize>,
    pub clauses: Vec<usize>,
    pub sequence: SequenceHandle,
    /// Vertices `0..h_prime_count` form the graph before padding.
    pub h_prime_count: usize,
    pub h_prime_weights: Vec<u64>,
    /// `(vertex, missing weight in structure units, first X index)`.
    pub deficient: Vec<(usize, u64, usize)>,
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub b_left: BottleneckHandle,
    pub b_right: BottleneckHandle,
}

impl HMeta {
    pub fn roots(&self) -> [usize; 2] {
        [self.b_left.root, self.b_right.root]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuiltH {
    pub graph: WeightedGraph,
    pub meta: HMeta,
}

/// Builds H(φ) with the given constants as they stand.
pub fn build_h(f: &NaeFormula, c: &Constants) -> Result<BuiltH> {
    validate_constants(c)?;
    f.check_strict()?;
    build_structure(f, c)
}

/// Builds H(φ) from the constants divided by `a` and multiplies every weight
/// by `a`, so that all weights (padding included) are multiples of `a`.
pub fn build_h_scaled(f: &NaeFormula, c: &Constants) -> Result<BuiltH> {
    validate_constants(c)?;
    let base = c.base();
    validate_constants(&base)?;
    f.check_strict()?;
    let mut built = build_structure(f, &base)?;
    built.graph.scale(c.a);
    for w in &mut built.meta.h_prime_weights {
        *w *= c.a;
    }
    built.meta.constants = *c;
    built.meta.weight_unit = c.a;
    Ok(built)
}

fn build_structure(f: &NaeFormula, c: &Constants) -> Result<BuiltH> {
    let n = f.num_vars();
    let mut g = WeightedGraph::new();
    let group = |g: &mut WeightedGraph, prefix: &str, role: Role, count: usize| -> Vec<usize> {
        (1..=count).map(|i| g.add_vertex(format!("{prefix}{i}"), role)).collect()
    };
    let variables = group(&mut g, "v", Role::Variable, n);
    let variable_bars = group(&mut g, "vbar", Role::VariableBar, n);
    let t = group(&mut g, "t", Role::T, n);
    let t_bars = group(&mut g, "tbar", Role::TBar, n);
    let fv = group(&mut g, "f", Role::F, n);
    let f_bars = group(&mut g, "fbar", Role::FBar, n);
    let clauses = group(&mut g, "c", Role::Clause, f.clauses().len());

    for (ci, clause) in f.clauses().iter().enumerate() {
        for &x in clause {
            g.add_edge(variables[x - 1], clauses[ci], c.lambda)?;
        }
    }
    for i in 0..n {
        g.add_edge(t[i], t_bars[i], c.tau - c.lambda)?;
        g.add_edge(fv[i], f_bars[i], c.tau - c.lambda)?;
        for v in [variables[i], variable_bars[i]] {
            g.add_edge(v, t[i], c.lambda)?;
            g.add_edge(v, fv[i], c.lambda)?;
        }
    }
    let attach = |ids: &[usize], w: u64| -> Vec<(usize, u64)> { ids.iter().map(|&v| (v, w)).collect() };
    let sequence = build_bottleneck_sequence(
        &mut g,
        [
            &attach(&t, c.tau - c.lambda),
            &attach(&clauses, c.tau - 2 * c.lambda),
            &attach(&fv, c.tau - c.lambda),
        ],
        c,
    )?;

    let h_prime_count = g.vertex_count();
    let full = c.tau + c.gamma + 1;
    let h_prime_weights: Vec<u64> = (0..h_prime_count).map(|v| g.vertex_weight(v).expect("in range")).collect();
    let mut deficient = Vec::new();
    let mut p = 0usize;
    for (v, &w) in h_prime_weights.iter().enumerate() {
        if w < full {
            deficient.push((v, full - w, p));
            p += (full - w) as usize;
        }
    }
    let x = group(&mut g, "x", Role::PadX, p);
    let y = group(&mut g, "y", Role::PadY, p);
    let side = c.tau - c.gamma - 1;
    let b_left = build_bottleneck(&mut g, "BL", &attach(&x, side), c)?;
    let b_right = build_bottleneck(&mut g, "BR", &attach(&y, side), c)?;
    for j in 0..p {
        g.add_edge(x[j], y[j], 2 * c.gamma + 2)?;
    }
    for &(v, missing, start) in &deficient {
        for &xj in &x[start..start + missing as usize] {
            g.add_edge(v, xj, 1)?;
        }
    }

    let meta = HMeta {
        constants: *c,
        weight_unit: 1,
        structure: *c,
        formula: f.clone(),
        variables,
        variable_bars,
        t,
        t_bars,
        f: fv,
        f_bars,
        clauses,
        sequence,
        h_prime_count,
        h_prime_weights,
        deficient,
        x,
        y,
        b_left,
        b_right,
    };
    Ok(BuiltH { graph: g, meta })
}

/// The `τ`-balancing order of H(φ) induced by a NAE-satisfying assignment.
pub fn witness_order(f: &NaeFormula, h: &BuiltH, a: &Assignment) -> Result<LinearOrder> {
    if !eval_nae(f, a)? {
        return Err(Error::NotSatisfying);
    }
    let m = &h.meta;
    if m.formula != *f {
        return Err(Error::invalid("formula does not match the one H was built from"));
    }
    let n = f.num_vars();

    let mut inner: Vec<usize> = m.t_bars.clone();
    inner.extend((0..n).filter(|&i| a.0[i]).map(|i| m.variables[i]));
    inner.extend((0..n).filter(|&i| !a.0[i]).map(|i| m.variable_bars[i]));
    inner.extend(direct_order_of_sequence(&m.sequence));
    inner.extend((0..n).filter(|&i| !a.0[i]).map(|i| m.variables[i]));
    inner.extend((0..n).filter(|&i| a.0[i]).map(|i| m.variable_bars[i]));
    inner.extend(m.f_bars.iter().copied());

    // Side weights inside the unpadded graph, in structure units.
    let unit = m.weight_unit;
    let mut pos = vec![usize::MAX; h.graph.vertex_count()];
    for (i, &v) in inner.iter().enumerate() {
        pos[v] = i;
    }
    let sides = |u: usize| -> (u64, u64) {
        let (mut l, mut r) = (0, 0);
        for &(v, w) in h.graph.neighbors(u) {
            if v < m.h_prime_count {
                if pos[v] < pos[u] {
                    l += w / unit;
                } else {
                    r += w / unit;
                }
            }
        }
        (l, r)
    };
    let mut padding = vec![None; h.graph.vertex_count()];
    for &(v, missing, start) in &m.deficient {
        padding[v] = Some((missing, start));
    }
    let c = &m.structure;

    let mut order: Vec<usize> = Vec::with_capacity(h.graph.vertex_count());
    for &(a_i, b_i) in m.b_left.spine.iter().rev() {
        order.extend([b_i, a_i]);
    }
    for &u in &inner {
        let Some((missing, start)) = padding[u] else {
            order.push(u);
            continue;
        };
        let xs = &m.x[start..start + missing as usize];
        let (s_l, s_r) = sides(u);
        let before = if s_r > c.gamma + 1 { xs.len() } else { (c.tau - s_l).min(missing) as usize };
        order.extend(&xs[..before]);
        order.push(u);
        order.extend(&xs[before..]);
    }
    order.extend(&m.y);
    order.extend(m.b_right.spine_vertices());
    LinearOrder::new(order, h.graph.vertex_count())
}

/// Reads an assignment off a `(τ+γ)`-balancing order: `x` is true iff `v_x`
/// precedes every clause vertex.
pub fn decode_assignment(f: &NaeFormula, h: &BuiltH, ord: &LinearOrder) -> Result<Assignment> {
    let c = &h.meta.constants;
    let threshold = c.tau + c.gamma;
    if let Some(v) = check_balancing_order(&h.graph, ord, threshold)? {
        return Err(Error::NotBalancing { threshold, vertex: v.vertex, left: v.left, right: v.right });
    }
    let pos = ord.positions();
    let first_c = h.meta.clauses.iter().map(|&c| pos[c]).min().unwrap_or(usize::MAX);
    let last_c = h.meta.clauses.iter().map(|&c| pos[c]).max().unwrap_or(0);
    let mut values = Vec::with_capacity(f.num_vars());
    for &v in &h.meta.variables {
        if pos[v] < first_c {
            values.push(true);
        } else if pos[v] > last_c {
            values.push(false);
        } else {
            return Err(Error::SurroundedVariable { vertex: v });
        }
    }
    Ok(Assignment(values))
}
