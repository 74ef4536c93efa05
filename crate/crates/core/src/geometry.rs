//! Closed polygonal boundaries, their segments and the piecewise-linear
//! basis functions living on them.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = [f64; 2];

#[inline]
pub(crate) fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub(crate) fn add_scaled(a: Point, s: f64, d: Point) -> Point {
    [a[0] + s * d[0], a[1] + s * d[1]]
}

#[inline]
pub(crate) fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub(crate) fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub(crate) fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}

/// Which end of a segment a mesh node sits at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeAt {
    A,
    B,
}

impl NodeAt {
    pub const BOTH: [NodeAt; 2] = [NodeAt::A, NodeAt::B];

    /// Value of the basis restriction at local coordinate `t` in `[0, 1]`.
    #[inline]
    pub fn value(self, t: f64) -> f64 {
        match self {
            NodeAt::A => 1.0 - t,
            NodeAt::B => t,
        }
    }

    pub fn other(self) -> NodeAt {
        match self {
            NodeAt::A => NodeAt::B,
            NodeAt::B => NodeAt::A,
        }
    }

    pub(crate) fn index(self) -> usize {
        match self {
            NodeAt::A => 0,
            NodeAt::B => 1,
        }
    }
}

/// One straight boundary element, from `a` to `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentGeom {
    pub a: Point,
    pub b: Point,
    pub length: f64,
    pub normal: Point,
}

impl SegmentGeom {
    /// Builds the segment; the normal is `(y_B - y_A, x_A - x_B) / l`, which
    /// points outward for a counterclockwise boundary.
    pub fn new(a: Point, b: Point) -> Result<Self> {
        let d = sub(b, a);
        let length = norm(d);
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::Argument(format!(
                "segment endpoints {a:?} and {b:?} do not define a finite segment"
            )));
        }
        Ok(SegmentGeom {
            a,
            b,
            length,
            normal: [d[1] / length, -d[0] / length],
        })
    }

    /// Point at local coordinate `t`, `r(t) = a + (b - a) t`.
    #[inline]
    pub fn point(&self, t: f64) -> Point {
        add_scaled(self.a, t, sub(self.b, self.a))
    }

    pub fn end(&self, at: NodeAt) -> Point {
        match at {
            NodeAt::A => self.a,
            NodeAt::B => self.b,
        }
    }

    /// Vector from the `from` end to the opposite end.
    pub fn edge_from(&self, from: NodeAt) -> Point {
        sub(self.end(from.other()), self.end(from))
    }
}

/// Surface curl of the basis restriction: `-1/l` for a node at `A`,
/// `+1/l` for a node at `B`.
pub fn basis_curl(seg: &SegmentGeom, node_at: NodeAt) -> f64 {
    match node_at {
        NodeAt::A => -1.0 / seg.length,
        NodeAt::B => 1.0 / seg.length,
    }
}

/// Relationship between two segments of a mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SegmentPairClass {
    Coincident,
    /// The two segments share exactly one node; `m_end` and `n_end` say
    /// which end of each segment it is.
    AdjacentSharedVertex { m_end: NodeAt, n_end: NodeAt },
    Disjoint,
}

/// A validated closed counterclockwise polygon.
///
/// Segment `n` joins node `n` to node `n + 1 (mod N)`; node `j` is end `A`
/// of segment `j` and end `B` of segment `j - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    nodes: Vec<Point>,
    reoriented: bool,
}

impl Mesh {
    /// Validates `nodes` as a simple closed polygon. A clockwise polygon is
    /// reoriented by reversing the order of nodes `1..N` (node 0 keeps its
    /// index) and [`Mesh::reoriented`] reports it.
    pub fn new(mut nodes: Vec<Point>) -> Result<Self> {
        let n = nodes.len();
        if n < 3 {
            return Err(Error::Argument(format!(
                "a closed boundary needs at least 3 nodes, got {n}"
            )));
        }
        if let Some(i) = nodes.iter().position(|p| !(p[0].is_finite() && p[1].is_finite())) {
            return Err(Error::Argument(format!("node {i} has non-finite coordinates")));
        }
        for s in 0..n {
            let t = (s + 1) % n;
            if nodes[s] == nodes[t] {
                return Err(Error::DegenerateSegment { segment: s, a: s, b: t });
            }
        }
        let area2: f64 = (0..n).map(|i| cross(nodes[i], nodes[(i + 1) % n])).sum();
        let reoriented = area2 < 0.0;
        if reoriented {
            nodes[1..].reverse();
        }
        let mesh = Mesh { nodes, reoriented };
        mesh.check_simple()?;
        Ok(mesh)
    }

    fn check_simple(&self) -> Result<()> {
        let n = self.nodes.len();
        let scale = self.diameter();
        for i in 0..n {
            for j in (i + 1)..n {
                let si = self.segment(i);
                let sj = self.segment(j);
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    // touching only at the shared vertex; fold-backs overlap
                    let (u, v) = if j == i + 1 {
                        (sub(si.a, si.b), sub(sj.b, sj.a))
                    } else {
                        (sub(si.b, si.a), sub(sj.a, sj.b))
                    };
                    if cross(u, v).abs() <= 1e-14 * norm(u) * norm(v) && dot(u, v) > 0.0 {
                        return Err(Error::SelfIntersection(i, j));
                    }
                } else if segments_touch(&si, &sj, 1e-14 * scale) {
                    return Err(Error::SelfIntersection(i, j));
                }
            }
        }
        Ok(())
    }

    /// Parses the line-oriented mesh text format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let perr = |line: usize, msg: &str| Error::Parse {
            line,
            msg: msg.to_string(),
        };
        let (ln, magic) = lines.next().ok_or_else(|| perr(1, "empty mesh document"))?;
        if magic.split_whitespace().collect::<Vec<_>>() != ["helmbem-mesh", "1"] {
            return Err(perr(ln, "expected header `helmbem-mesh 1`"));
        }
        let (ln, count) = lines
            .next()
            .ok_or_else(|| perr(ln + 1, "missing `nodes <N>` line"))?;
        let count: usize = match count.split_whitespace().collect::<Vec<_>>()[..] {
            ["nodes", c] => c.parse().map_err(|_| perr(ln, "node count is not an integer"))?,
            _ => return Err(perr(ln, "expected `nodes <N>`")),
        };
        let mut nodes = Vec::with_capacity(count);
        let mut last = ln;
        for _ in 0..count {
            let (ln, l) = lines
                .next()
                .ok_or_else(|| perr(last + 1, &format!("expected {count} node lines")))?;
            last = ln;
            let xs: Vec<&str> = l.split_whitespace().collect();
            if xs.len() != 2 {
                return Err(perr(ln, "expected two coordinates `<x> <y>`"));
            }
            let x: f64 = xs[0].parse().map_err(|_| perr(ln, "invalid x coordinate"))?;
            let y: f64 = xs[1].parse().map_err(|_| perr(ln, "invalid y coordinate"))?;
            nodes.push([x, y]);
        }
        if let Some((ln, _)) = lines.next() {
            return Err(perr(ln, "unexpected content after the node list"));
        }
        Mesh::new(nodes)
    }

    /// Serializes to the text format accepted by [`Mesh::parse`].
    pub fn to_text(&self) -> String {
        let mut s = format!("helmbem-mesh 1\nnodes {}\n", self.nodes.len());
        for p in &self.nodes {
            let _ = writeln!(s, "{:?} {:?}", p[0], p[1]);
        }
        s
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn segment_count(&self) -> usize {
        self.nodes.len()
    }

    /// True if the input was clockwise and has been reoriented.
    pub fn reoriented(&self) -> bool {
        self.reoriented
    }

    pub fn segment(&self, s: usize) -> SegmentGeom {
        let n = self.nodes.len();
        SegmentGeom::new(self.nodes[s % n], self.nodes[(s + 1) % n])
            .expect("validated mesh has non-degenerate segments")
    }

    pub fn segments(&self) -> impl Iterator<Item = SegmentGeom> + '_ {
        (0..self.segment_count()).map(|s| self.segment(s))
    }

    /// Mesh node at end `at` of segment `s`.
    pub fn node_of(&self, s: usize, at: NodeAt) -> usize {
        let n = self.nodes.len();
        match at {
            NodeAt::A => s % n,
            NodeAt::B => (s + 1) % n,
        }
    }

    /// Largest distance between two nodes.
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, p) in self.nodes.iter().enumerate() {
            for q in &self.nodes[i + 1..] {
                d = d.max(norm(sub(*p, *q)));
            }
        }
        d
    }

    pub fn perimeter(&self) -> f64 {
        self.segments().map(|s| s.length).sum()
    }

    /// Copy with every coordinate multiplied by `s > 0`.
    pub fn scaled(&self, s: f64) -> Result<Mesh> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::Argument(format!("scale factor must be > 0, got {s}")));
        }
        Mesh::new(self.nodes.iter().map(|p| [p[0] * s, p[1] * s]).collect())
    }

    /// Regular `n`-gon of circumradius `radius`, counterclockwise from angle 0.
    pub fn regular_polygon(n: usize, radius: f64) -> Result<Mesh> {
        Mesh::new(
            (0..n)
                .map(|i| {
                    let a = TAU * i as f64 / n as f64;
                    [radius * a.cos(), radius * a.sin()]
                })
                .collect(),
        )
    }
}

fn segments_touch(p: &SegmentGeom, q: &SegmentGeom, tol: f64) -> bool {
    let d1 = cross(sub(p.b, p.a), sub(q.a, p.a));
    let d2 = cross(sub(p.b, p.a), sub(q.b, p.a));
    let d3 = cross(sub(q.b, q.a), sub(p.a, q.a));
    let d4 = cross(sub(q.b, q.a), sub(p.b, q.a));
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    point_segment_distance(q.a, p) <= tol
        || point_segment_distance(q.b, p) <= tol
        || point_segment_distance(p.a, q) <= tol
        || point_segment_distance(p.b, q) <= tol
}

fn point_segment_distance(x: Point, s: &SegmentGeom) -> f64 {
    let d = sub(s.b, s.a);
    let t = (dot(sub(x, s.a), d) / dot(d, d)).clamp(0.0, 1.0);
    norm(sub(x, s.point(t)))
}

/// Classifies the ordered segment pair `(m, n)`.
pub fn classify_pair(mesh: &Mesh, m: usize, n: usize) -> SegmentPairClass {
    if m == n {
        return SegmentPairClass::Coincident;
    }
    for m_end in NodeAt::BOTH {
        for n_end in NodeAt::BOTH {
            if mesh.node_of(m, m_end) == mesh.node_of(n, n_end) {
                return SegmentPairClass::AdjacentSharedVertex { m_end, n_end };
            }
        }
    }
    SegmentPairClass::Disjoint
}

/// Interior angle `theta` in `(0, 2 pi)` at the vertex shared by segments
/// `m` and `n`, between the directions pointing away from the vertex.
pub fn adjacent_angle(mesh: &Mesh, m: usize, n: usize) -> Result<f64> {
    match classify_pair(mesh, m, n) {
        SegmentPairClass::AdjacentSharedVertex { m_end, n_end } => {
            let sm = mesh.segment(m);
            let sn = mesh.segment(n);
            // the leaving segment has the vertex at A; measure from it
            // counterclockwise to the arriving one, the interior side of a
            // counterclockwise boundary
            let (out, inc) = if m_end == NodeAt::A {
                (sm.edge_from(m_end), sn.edge_from(n_end))
            } else {
                (sn.edge_from(n_end), sm.edge_from(m_end))
            };
            Ok(angle_between(out, inc))
        }
        other => Err(Error::Argument(format!(
            "segments {m} and {n} are not adjacent ({other:?})"
        ))),
    }
}

/// Counterclockwise angle from `u` to `v`, mapped to `(0, 2 pi)`.
pub(crate) fn angle_between(u: Point, v: Point) -> f64 {
    let a = cross(u, v).atan2(dot(u, v));
    if a <= 0.0 {
        a + TAU
    } else {
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn square() -> Mesh {
        Mesh::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap()
    }

    #[test]
    fn unit_square() {
        let m = square();
        assert_eq!(m.segment_count(), 4);
        assert!(!m.reoriented());
        for s in m.segments() {
            assert_eq!(s.length, 1.0);
        }
        assert_eq!(m.segment(0).normal, [0.0, -1.0]);
        assert_eq!(m.segment(1).normal, [1.0, 0.0]);
    }

    #[test]
    fn clockwise_input_is_reoriented() {
        let cw = Mesh::new(vec![[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]]).unwrap();
        assert!(cw.reoriented());
        assert_eq!(cw.nodes(), square().nodes());
    }

    #[test]
    fn degenerate_and_crossing_meshes() {
        let e = Mesh::new(vec![[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]).unwrap_err();
        assert_eq!(e, Error::DegenerateSegment { segment: 0, a: 0, b: 1 });
        let bowtie = vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]];
        assert!(matches!(Mesh::new(bowtie), Err(Error::SelfIntersection(_, _))));
        assert!(Mesh::new(vec![[0.0, 0.0], [1.0, 0.0]]).is_err());
        let spike = vec![[0.0, 0.0], [2.0, 0.0], [1.0, 0.0], [1.0, 1.0]];
        assert!(matches!(Mesh::new(spike), Err(Error::SelfIntersection(_, _))));
    }

    #[test]
    fn parse_round_trip() {
        let text = "# a square\nhelmbem-mesh 1\nnodes 4\n0 0\n1 0 # corner\n1 1\n\n0 1\n";
        let m = Mesh::parse(text).unwrap();
        assert_eq!(m, square());
        assert_eq!(Mesh::parse(&m.to_text()).unwrap(), m);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let e = Mesh::parse("helmbem-mesh 1\nnodes 3\n0 0\n1 x\n0 1\n").unwrap_err();
        assert_eq!(
            e,
            Error::Parse {
                line: 4,
                msg: "invalid y coordinate".into()
            }
        );
        assert!(matches!(Mesh::parse("mesh 2\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(
            Mesh::parse("helmbem-mesh 1\nnodes 4\n0 0\n1 0\n1 1\n"),
            Err(Error::Parse { line: 6, .. })
        ));
        assert!(matches!(
            Mesh::parse("helmbem-mesh 1\nnodes 3\n0 0\n1 0\n1 1\n5 5\n"),
            Err(Error::Parse { line: 6, .. })
        ));
    }

    #[test]
    fn pair_classification() {
        let m = square();
        assert_eq!(classify_pair(&m, 0, 0), SegmentPairClass::Coincident);
        assert_eq!(
            classify_pair(&m, 0, 1),
            SegmentPairClass::AdjacentSharedVertex {
                m_end: NodeAt::B,
                n_end: NodeAt::A
            }
        );
        assert_eq!(
            classify_pair(&m, 0, 3),
            SegmentPairClass::AdjacentSharedVertex {
                m_end: NodeAt::A,
                n_end: NodeAt::B
            }
        );
        assert_eq!(classify_pair(&m, 0, 2), SegmentPairClass::Disjoint);
    }

    #[test]
    fn angles() {
        let m = square();
        assert_relative_eq!(adjacent_angle(&m, 0, 1).unwrap(), FRAC_PI_2);
        assert_relative_eq!(adjacent_angle(&m, 1, 0).unwrap(), FRAC_PI_2);
        assert!(adjacent_angle(&m, 0, 2).is_err());
        let hex = Mesh::regular_polygon(6, 1.0).unwrap();
        assert_relative_eq!(adjacent_angle(&hex, 2, 3).unwrap(), 2.0 * PI / 3.0, epsilon = 1e-14);
        let flat = Mesh::new(vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [1.0, 1.0]]).unwrap();
        assert_relative_eq!(adjacent_angle(&flat, 0, 1).unwrap(), PI);
        // reflex corner at node 2 of an L shape
        let l = Mesh::new(vec![
            [0.0, 0.0],
            [2.0, 0.0],
            [2.0, 1.0],
            [1.0, 1.0],
            [1.0, 2.0],
            [0.0, 2.0],
        ])
        .unwrap();
        assert_relative_eq!(adjacent_angle(&l, 2, 3).unwrap(), 1.5 * PI);
    }

    #[test]
    fn curls() {
        let s = SegmentGeom::new([0.0, 0.0], [2.0, 0.0]).unwrap();
        assert_eq!(basis_curl(&s, NodeAt::A), -0.5);
        let u = SegmentGeom::new([0.0, 0.0], [0.0, 1.0]).unwrap();
        assert_eq!(basis_curl(&u, NodeAt::B), 1.0);
        assert_eq!(basis_curl(&s, NodeAt::A) + basis_curl(&s, NodeAt::B), 0.0);
    }

    #[test]
    fn normals_are_unit_and_orthogonal() {
        let m = Mesh::new(vec![[0.3, -0.1], [2.0, 0.4], [1.1, 1.7], [-0.5, 0.9]]).unwrap();
        let mut acc = [0.0, 0.0];
        for s in m.segments() {
            assert!((norm(s.normal) - 1.0).abs() <= 1e-14);
            assert!(dot(s.normal, sub(s.b, s.a)).abs() <= 1e-14);
            acc = add_scaled(acc, s.length, s.normal);
        }
        assert!(norm(acc) <= 1e-12);
    }
}
