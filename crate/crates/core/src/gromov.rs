//! Gromov hyperbolicity: slim geodesic triangles and the four-point scalar.
//!
//! A triangle's slimness is the largest distance from a node on one side to the
//! union of the other two sides, taken over all three sides. By default each
//! node triple is charged its worst geodesic triangle, which is the usual
//! δ-slim notion; [`GeodesicChoice::Best`] charges the best one instead.

use std::collections::HashMap;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DistanceMatrix, Graph};

pub const DEFAULT_GEODESIC_CAP: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    /// Largest triple value; the usual hyperbolicity constant.
    #[default]
    Max,
    /// Smallest triple value.
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeodesicChoice {
    /// A triple is worth the maximum over all geodesic triangles on it.
    #[default]
    Worst,
    /// A triple is worth the minimum over all geodesic triangles on it.
    /// Enumerates geodesics, subject to the geodesic cap.
    Best,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlimOptions {
    pub aggregation: Aggregation,
    pub geodesics: GeodesicChoice,
    pub geodesic_cap: usize,
    /// Insert a midpoint on every edge and halve the result.
    pub subdivide: bool,
}

impl Default for SlimOptions {
    fn default() -> Self {
        SlimOptions {
            aggregation: Aggregation::Max,
            geodesics: GeodesicChoice::Worst,
            geodesic_cap: DEFAULT_GEODESIC_CAP,
            subdivide: false,
        }
    }
}

/// Three corners and the three sides `u–v`, `u–w`, `v–w`, each listed from its
/// first corner to its second.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeodesicTriangle {
    pub corners: [String; 3],
    pub sides: [Vec<String>; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlimnessResult {
    #[serde(serialize_with = "crate::measure::ser_ratio")]
    pub value: Rational64,
    pub witness_triangle: Option<GeodesicTriangle>,
    pub witness_node: Option<String>,
    pub aggregation: Aggregation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Geodesics {
    pub paths: Vec<Vec<usize>>,
    /// More than `cap` geodesics exist; `paths` holds the first `cap`.
    pub overflow: bool,
}

/// All shortest `u`–`v` paths in lexicographic order of node ids.
pub fn enumerate_geodesics(g: &Graph, u: usize, v: usize, cap: usize) -> Result<Geodesics> {
    let to_v = g.bfs(v);
    if to_v[u].is_none() {
        return Err(Error::Unreachable(g.label(u).into(), g.label(v).into()));
    }
    let to_v: Vec<u32> = to_v.into_iter().map(|d| d.unwrap_or(u32::MAX)).collect();
    let mut out = Geodesics { paths: Vec::new(), overflow: false };
    let mut path = vec![u];
    walk(g, &to_v, v, cap, &mut path, &mut out);
    Ok(out)
}

fn walk(g: &Graph, to_v: &[u32], v: usize, cap: usize, path: &mut Vec<usize>, out: &mut Geodesics) {
    if out.overflow {
        return;
    }
    let x = *path.last().unwrap();
    if x == v {
        if out.paths.len() == cap {
            out.overflow = true;
        } else {
            out.paths.push(path.clone());
        }
        return;
    }
    for &y in g.neighbors(x) {
        if to_v[y] + 1 == to_v[x] {
            path.push(y);
            walk(g, to_v, v, cap, path, out);
            path.pop();
        }
    }
}

fn side_deviation(dist: &DistanceMatrix, side: &[usize], a: &[usize], b: &[usize]) -> u32 {
    side.iter().map(|&x| a.iter().chain(b).map(|&y| dist.raw(x, y)).min().unwrap_or(0)).max().unwrap_or(0)
}

/// Per-side deviations of a triangle given as node ids (`sides` = uv, uw, vw).
pub fn side_deviations(dist: &DistanceMatrix, sides: [&[usize]; 3]) -> [u32; 3] {
    [
        side_deviation(dist, sides[0], sides[1], sides[2]),
        side_deviation(dist, sides[1], sides[0], sides[2]),
        side_deviation(dist, sides[2], sides[0], sides[1]),
    ]
}

fn check_side(g: &Graph, dist: &DistanceMatrix, side: &[usize], a: usize, b: usize) -> Result<()> {
    let bad = |msg: &str| Err(Error::InvalidParameter(format!("side {}–{}: {msg}", g.label(a), g.label(b))));
    if side.first() != Some(&a) || side.last() != Some(&b) {
        return bad("endpoints do not match corners");
    }
    if side.windows(2).any(|w| !g.has_edge(w[0], w[1])) {
        return bad("consecutive nodes are not adjacent");
    }
    match dist.get(a, b) {
        Some(d) if d as usize + 1 == side.len() => Ok(()),
        _ => bad("not a shortest path"),
    }
}

fn triangle_ids(g: &Graph, t: &GeodesicTriangle) -> Result<([usize; 3], [Vec<usize>; 3])> {
    let c = [g.node(&t.corners[0])?, g.node(&t.corners[1])?, g.node(&t.corners[2])?];
    let ids = |s: &Vec<String>| s.iter().map(|l| g.node(l)).collect::<Result<Vec<_>>>();
    Ok((c, [ids(&t.sides[0])?, ids(&t.sides[1])?, ids(&t.sides[2])?]))
}

/// Slimness of one geodesic triangle: the maximum over its sides of the
/// largest node-to-other-sides distance.
pub fn triangle_slimness(g: &Graph, t: &GeodesicTriangle) -> Result<u32> {
    let dist = g.all_pairs_distances();
    let (c, s) = triangle_ids(g, t)?;
    check_side(g, &dist, &s[0], c[0], c[1])?;
    check_side(g, &dist, &s[1], c[0], c[2])?;
    check_side(g, &dist, &s[2], c[1], c[2])?;
    let dev = side_deviations(&dist, [&s[0], &s[1], &s[2]]);
    let v = *dev.iter().max().unwrap();
    let longest = s.iter().map(|p| p.len() - 1).max().unwrap() as u32;
    debug_assert!(v <= longest / 2, "slimness {v} exceeds half the longest side {longest}");
    Ok(v)
}

pub fn slim_hyperbolicity(g: &Graph, opts: &SlimOptions) -> Result<SlimnessResult> {
    if opts.subdivide {
        let (h, _) = subdivide(g);
        let mut inner = *opts;
        inner.subdivide = false;
        let mut r = slim_hyperbolicity(&h, &inner)?;
        r.value /= 2;
        return Ok(r);
    }
    let dist = g.all_pairs_distances();
    if !dist.is_connected() {
        return Err(Error::Disconnected);
    }
    match opts.geodesics {
        GeodesicChoice::Worst => slim_worst(g, &dist, opts.aggregation),
        GeodesicChoice::Best => slim_best(g, &dist, opts),
    }
}

/// Every edge `{a, b}` becomes `a – a|b – b`. Returns the new graph and the ids
/// of the original nodes in it (which keep their positions).
pub fn subdivide(g: &Graph) -> (Graph, Vec<usize>) {
    let n = g.n();
    let mut labels = g.labels().to_vec();
    let mut edges = Vec::with_capacity(2 * g.m());
    for (i, &(a, b)) in g.edges().iter().enumerate() {
        labels.push(format!("{}|{}", g.label(a), g.label(b)));
        edges.push((a, n + i));
        edges.push((n + i, b));
    }
    (Graph::new(labels, edges).expect("subdivision is simple"), (0..n).collect())
}

/// For the pair (a, c): `f[x]` is the largest, over a–c geodesics P, of dist(x, P).
fn bottleneck_row(g: &Graph, dist: &DistanceMatrix, a: usize, c: usize) -> Vec<u32> {
    let n = g.n();
    let dac = dist.raw(a, c);
    let mut interval: Vec<usize> = (0..n).filter(|&y| dist.raw(a, y) + dist.raw(y, c) == dac).collect();
    interval.sort_by_key(|&y| std::cmp::Reverse(dist.raw(a, y)));
    let mut best: HashMap<usize, Vec<u32>> = HashMap::with_capacity(interval.len());
    for &y in &interval {
        let row = dist.row(y);
        let v = if y == c {
            row.to_vec()
        } else {
            let mut acc = vec![0u32; n];
            for &z in g.neighbors(y) {
                if dist.raw(a, z) == dist.raw(a, y) + 1 && dist.raw(z, c) + 1 == dist.raw(y, c) {
                    for (t, &bz) in acc.iter_mut().zip(&best[&z]) {
                        *t = (*t).max(bz);
                    }
                }
            }
            acc.iter().zip(row).map(|(&m, &r)| m.min(r)).collect()
        };
        best.insert(y, v);
    }
    best.remove(&a).unwrap()
}

/// A geodesic a–c whose distance to x is `bottleneck_row(a, c)[x]`, smallest ids first.
fn bottleneck_path(g: &Graph, dist: &DistanceMatrix, a: usize, c: usize, x: usize) -> Vec<usize> {
    let n = g.n();
    let dac = dist.raw(a, c);
    let mut order: Vec<usize> = (0..n).filter(|&y| dist.raw(a, y) + dist.raw(y, c) == dac).collect();
    order.sort_by_key(|&y| std::cmp::Reverse(dist.raw(a, y)));
    let mut b = vec![0u32; n];
    for &y in &order {
        let own = dist.raw(x, y);
        b[y] = if y == c {
            own
        } else {
            let m = g
                .neighbors(y)
                .iter()
                .filter(|&&z| dist.raw(a, z) == dist.raw(a, y) + 1 && dist.raw(z, c) + 1 == dist.raw(y, c))
                .map(|&z| b[z])
                .max()
                .unwrap();
            m.min(own)
        };
    }
    let target = b[a];
    let mut path = vec![a];
    let mut y = a;
    while y != c {
        y = *g
            .neighbors(y)
            .iter()
            .find(|&&z| dist.raw(a, z) == dist.raw(a, y) + 1 && dist.raw(z, c) + 1 == dist.raw(y, c) && b[z] >= target)
            .unwrap();
        path.push(y);
    }
    path
}

/// First geodesic from a to b in lexicographic order.
fn first_geodesic(g: &Graph, dist: &DistanceMatrix, a: usize, b: usize) -> Vec<usize> {
    let mut path = vec![a];
    let mut y = a;
    while y != b {
        y = *g.neighbors(y).iter().find(|&&z| dist.raw(z, b) + 1 == dist.raw(y, b)).unwrap();
        path.push(y);
    }
    path
}

struct PairTable {
    n: usize,
    rows: Vec<Vec<u32>>,
}

impl PairTable {
    fn get(&self, a: usize, c: usize) -> &[u32] {
        let (a, c) = if a < c { (a, c) } else { (c, a) };
        &self.rows[a * self.n + c]
    }
}

fn slim_worst(g: &Graph, dist: &DistanceMatrix, agg: Aggregation) -> Result<SlimnessResult> {
    let n = g.n();
    if n < 3 {
        return Ok(SlimnessResult { value: 0.into(), witness_triangle: None, witness_node: None, aggregation: agg });
    }
    let mut rows = vec![Vec::new(); n * n];
    let mut intervals = vec![Vec::new(); n * n];
    for a in 0..n {
        for c in a + 1..n {
            rows[a * n + c] = bottleneck_row(g, dist, a, c);
            let dac = dist.raw(a, c);
            intervals[a * n + c] = (0..n).filter(|&x| dist.raw(a, x) + dist.raw(x, c) == dac).collect::<Vec<_>>();
        }
    }
    let table = PairTable { n, rows };
    let side_value = |a: usize, b: usize, c: usize| -> u32 {
        let (p, q) = if a < b { (a, b) } else { (b, a) };
        let fa = table.get(a, c);
        let fb = table.get(b, c);
        intervals[p * n + q].iter().map(|&x| fa[x].min(fb[x])).max().unwrap_or(0)
    };
    let mut best: Option<(u32, [usize; 3])> = None;
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let v = side_value(a, b, c).max(side_value(a, c, b)).max(side_value(b, c, a));
                debug_assert!({
                    let longest = dist.raw(a, b).max(dist.raw(a, c)).max(dist.raw(b, c));
                    v <= longest / 2
                });
                let better = match (best, agg) {
                    (None, _) => true,
                    (Some((bv, _)), Aggregation::Max) => v > bv,
                    (Some((bv, _)), Aggregation::Min) => v < bv,
                };
                if better {
                    best = Some((v, [a, b, c]));
                }
            }
        }
    }
    let (value, [a, b, c]) = best.unwrap();
    // Rebuild a triangle attaining the value: designated side, witness node, sides.
    let sides = [(a, b, c), (a, c, b), (b, c, a)];
    let (p, q, r, x) = sides
        .iter()
        .find_map(|&(p, q, r)| {
            let (fp, fq) = (table.get(p, r), table.get(q, r));
            intervals[p * n + q].iter().find(|&&x| fp[x].min(fq[x]) == value).map(|&x| (p, q, r, x))
        })
        .ok_or_else(|| Error::Internal("slim witness not found".into()))?;
    let mut pq = first_geodesic(g, dist, p, x);
    pq.extend(first_geodesic(g, dist, x, q).into_iter().skip(1));
    let pr = bottleneck_path(g, dist, p, r, x);
    let qr = bottleneck_path(g, dist, q, r, x);
    // Put the sides back in (a, b, c) order: uv, uw, vw.
    let mut by_pair: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for path in [pq, pr, qr] {
        let (s, t) = (path[0], *path.last().unwrap());
        if s < t {
            by_pair.insert((s, t), path);
        } else {
            by_pair.insert((t, s), path.into_iter().rev().collect());
        }
    }
    let s = [by_pair[&(a, b)].clone(), by_pair[&(a, c)].clone(), by_pair[&(b, c)].clone()];
    let dev = side_deviations(dist, [&s[0], &s[1], &s[2]]);
    if *dev.iter().max().unwrap() != value {
        return Err(Error::Internal(format!("slim witness triangle has value {:?}, expected {value}", dev)));
    }
    Ok(SlimnessResult {
        value: (value as i64).into(),
        witness_triangle: Some(labelled(g, [a, b, c], &s)),
        witness_node: Some(g.label(x).to_string()),
        aggregation: agg,
    })
}

fn labelled(g: &Graph, c: [usize; 3], s: &[Vec<usize>; 3]) -> GeodesicTriangle {
    let l = |p: &Vec<usize>| p.iter().map(|&v| g.label(v).to_string()).collect::<Vec<_>>();
    GeodesicTriangle { corners: c.map(|v| g.label(v).to_string()), sides: [l(&s[0]), l(&s[1]), l(&s[2])] }
}

fn slim_best(g: &Graph, dist: &DistanceMatrix, opts: &SlimOptions) -> Result<SlimnessResult> {
    let n = g.n();
    let agg = opts.aggregation;
    if n < 3 {
        return Ok(SlimnessResult { value: 0.into(), witness_triangle: None, witness_node: None, aggregation: agg });
    }
    let mut cache: HashMap<(usize, usize), Vec<Vec<usize>>> = HashMap::new();
    let mut geo = |a: usize, b: usize| -> Result<Vec<Vec<usize>>> {
        if let Some(p) = cache.get(&(a, b)) {
            return Ok(p.clone());
        }
        let r = enumerate_geodesics(g, a, b, opts.geodesic_cap)?;
        if r.overflow {
            return Err(Error::GeodesicOverflow { u: g.label(a).into(), v: g.label(b).into(), cap: opts.geodesic_cap });
        }
        cache.insert((a, b), r.paths.clone());
        Ok(r.paths)
    };
    type Best = (u32, [usize; 3], [Vec<usize>; 3], usize);
    let mut best: Option<Best> = None;
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let (ab, ac, bc) = (geo(a, b)?, geo(a, c)?, geo(b, c)?);
                let mut tri_best: Option<(u32, [Vec<usize>; 3])> = None;
                for p in &ab {
                    for q in &ac {
                        for r in &bc {
                            let v = *side_deviations(dist, [p, q, r]).iter().max().unwrap();
                            if tri_best.as_ref().is_none_or(|(bv, _)| v < *bv) {
                                tri_best = Some((v, [p.clone(), q.clone(), r.clone()]));
                            }
                        }
                    }
                }
                let (v, sides) = tri_best.unwrap();
                let better = match &best {
                    None => true,
                    Some((bv, ..)) => match agg {
                        Aggregation::Max => v > *bv,
                        Aggregation::Min => v < *bv,
                    },
                };
                if better {
                    let x = witness_node(dist, &sides, v);
                    best = Some((v, [a, b, c], sides, x));
                }
            }
        }
    }
    let (v, c, s, x) = best.unwrap();
    Ok(SlimnessResult {
        value: (v as i64).into(),
        witness_triangle: Some(labelled(g, c, &s)),
        witness_node: Some(g.label(x).to_string()),
        aggregation: agg,
    })
}

fn witness_node(dist: &DistanceMatrix, s: &[Vec<usize>; 3], v: u32) -> usize {
    for (i, side) in s.iter().enumerate() {
        let others: Vec<usize> = (0..3).filter(|&j| j != i).flat_map(|j| s[j].iter().copied()).collect();
        for &x in side {
            if others.iter().map(|&y| dist.raw(x, y)).min().unwrap() == v {
                return x;
            }
        }
    }
    s[0][0]
}

/// Gromov's four-point constant: the maximum over node quadruples of half the
/// gap between the two largest pairwise distance sums.
pub fn four_point_hyperbolicity(g: &Graph) -> Result<Rational64> {
    let dist = g.all_pairs_distances();
    let diam = dist.diameter()?;
    let n = g.n();
    let mut twice = 0u32;
    'outer: for i in 0..n {
        for j in i + 1..n {
            let dij = dist.raw(i, j);
            for k in j + 1..n {
                let (dik, djk) = (dist.raw(i, k), dist.raw(j, k));
                for l in k + 1..n {
                    let s1 = dij + dist.raw(k, l);
                    let s2 = dik + dist.raw(j, l);
                    let s3 = dist.raw(i, l) + djk;
                    let (hi, mid) = top_two(s1, s2, s3);
                    twice = twice.max(hi - mid);
                    if twice >= diam {
                        break 'outer;
                    }
                }
            }
        }
    }
    Ok(Rational64::new(twice as i64, 2))
}

fn top_two(a: u32, b: u32, c: u32) -> (u32, u32) {
    let hi = a.max(b).max(c);
    let lo = a.min(b).min(c);
    (hi, a + b + c - hi - lo)
}
