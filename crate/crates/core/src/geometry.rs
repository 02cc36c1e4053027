//! Polyline intersection predicates for sampled-resolution simplicity checks.

use crate::scalar::{Cx, Real};

fn cross<T: Real>(a: Cx<T>, b: Cx<T>) -> T {
    a.re * b.im - a.im * b.re
}

/// A common point of the closed segments `[p1, p2]` and `[q1, q2]`, if any.
/// Collinear overlaps report one point of the overlap.
pub fn segment_intersection<T: Real>(p1: Cx<T>, p2: Cx<T>, q1: Cx<T>, q2: Cx<T>) -> Option<Cx<T>> {
    let r = p2 - p1;
    let s = q2 - q1;
    let qp = q1 - p1;
    let denom = cross(r, s);
    let scale = r.norm() * s.norm();
    if denom.abs() <= T::epsilon() * scale {
        if cross(qp, r).abs() > T::epsilon() * T::lit(16.0) * (qp.norm() * r.norm()).max(T::min_positive_value()) {
            return None;
        }
        let rr = r.norm_sqr();
        if rr == T::zero() {
            return (p1 == q1 || (s.norm_sqr() > T::zero() && on_segment(p1, q1, q2))).then_some(p1);
        }
        let t0 = (qp.re * r.re + qp.im * r.im) / rr;
        let t1 = ((q2 - p1).re * r.re + (q2 - p1).im * r.im) / rr;
        let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
        if hi < T::zero() || lo > T::one() {
            return None;
        }
        return Some(p1 + r * lo.max(T::zero()));
    }
    let t = cross(qp, s) / denom;
    let u = cross(qp, r) / denom;
    let (zero, one) = (T::zero(), T::one());
    (t >= zero && t <= one && u >= zero && u <= one).then(|| p1 + r * t)
}

fn on_segment<T: Real>(p: Cx<T>, a: Cx<T>, b: Cx<T>) -> bool {
    let ab = b - a;
    let ap = p - a;
    cross(ab, ap).abs() <= T::epsilon() * T::lit(16.0) * ab.norm() * ap.norm()
        && ap.re * ab.re + ap.im * ab.im >= T::zero()
        && ap.norm_sqr() <= ab.norm_sqr()
}

/// Intersections between non-adjacent segments of one polyline.
pub fn self_intersections<T: Real>(poly: &[Cx<T>]) -> Vec<Cx<T>> {
    let mut hits = Vec::new();
    let n = poly.len();
    if n < 4 {
        return hits;
    }
    for i in 0..n - 1 {
        for j in i + 2..n - 1 {
            if let Some(p) = segment_intersection(poly[i], poly[i + 1], poly[j], poly[j + 1]) {
                hits.push(p);
            }
        }
    }
    hits
}

/// Intersections between segments of two different polylines.
pub fn cross_intersections<T: Real>(a: &[Cx<T>], b: &[Cx<T>]) -> Vec<Cx<T>> {
    let mut hits = Vec::new();
    for sa in a.windows(2) {
        for sb in b.windows(2) {
            if let Some(p) = segment_intersection(sa[0], sa[1], sb[0], sb[1]) {
                hits.push(p);
            }
        }
    }
    hits
}

/// Number of contacts among a family of polylines, ignoring any contact
/// within `tol` of one of the permitted `junctions`.
pub fn count_contacts<T: Real>(curves: &[&[Cx<T>]], junctions: &[Cx<T>], tol: T) -> usize {
    let permitted = |p: &Cx<T>| junctions.iter().any(|j| (*j - *p).norm() <= tol);
    let mut count = 0;
    for (i, a) in curves.iter().enumerate() {
        count += self_intersections(a).iter().filter(|p| !permitted(p)).count();
        for b in &curves[i + 1..] {
            count += cross_intersections(a, b).iter().filter(|p| !permitted(p)).count();
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Cx<f64> {
        Cx::new(re, im)
    }

    #[test]
    fn crossing_segments() {
        let p = segment_intersection(c(0.0, 0.0), c(2.0, 2.0), c(0.0, 2.0), c(2.0, 0.0)).unwrap();
        assert!((p - c(1.0, 1.0)).norm() < 1e-15);
        assert!(segment_intersection(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0), c(1.0, 1.0)).is_none());
        assert!(segment_intersection(c(0.0, 0.0), c(1.0, 1.0), c(2.0, 0.0), c(3.0, -1.0)).is_none());
    }

    #[test]
    fn touching_and_collinear() {
        let p = segment_intersection(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 1.0)).unwrap();
        assert_eq!(p, c(1.0, 0.0));
        assert!(segment_intersection(c(0.0, 0.0), c(0.0, 2.0), c(0.0, 1.0), c(0.0, 3.0)).is_some());
        assert!(segment_intersection(c(0.0, 0.0), c(0.0, 1.0), c(0.0, 2.0), c(0.0, 3.0)).is_none());
    }

    #[test]
    fn polyline_simplicity() {
        let zigzag = [c(0.0, 0.0), c(1.0, 1.0), c(2.0, 0.0), c(3.0, 1.0)];
        assert!(self_intersections(&zigzag).is_empty());
        let bowtie = [c(0.0, 0.0), c(2.0, 2.0), c(2.0, 0.0), c(0.0, 2.0)];
        assert_eq!(self_intersections(&bowtie).len(), 1);
    }

    #[test]
    fn junctions_are_permitted() {
        let stem = [c(0.0, 0.0), c(0.0, 1.0), c(0.0, 2.0)];
        let right = [c(0.0, 1.0), c(1.0, 1.5)];
        let left = [c(0.0, 1.0), c(-1.0, 1.5)];
        let curves: [&[Cx<f64>]; 3] = [&stem, &right, &left];
        assert!(count_contacts(&curves, &[c(0.0, 1.0)], 1e-12) == 0);
        assert!(count_contacts(&curves, &[], 1e-12) > 0);
    }
}
