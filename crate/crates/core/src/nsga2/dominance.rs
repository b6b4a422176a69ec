//! Pareto dominance, non-dominated sorting, crowding distance and 2-D
//! hypervolume. Every objective is minimized.

use crate::scalar::Scalar;

/// `a` dominates `b`: no worse in every objective, strictly better in one.
pub fn dominates<T: Scalar>(a: &[T], b: &[T]) -> bool {
    let mut strictly = false;
    for (&x, &y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly = true;
        }
    }
    strictly
}

/// Indices of the points no other point dominates, in input order.
pub fn pareto_filter<T: Scalar, P: AsRef<[T]>>(points: &[P]) -> Vec<usize> {
    (0..points.len())
        .filter(|&i| {
            !points
                .iter()
                .any(|q| dominates(q.as_ref(), points[i].as_ref()))
        })
        .collect()
}

/// Fronts of successive non-domination, best first; indices within a
/// front are ascending.
pub fn non_dominated_sort<T: Scalar, P: AsRef<[T]>>(points: &[P]) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut dominated_by_count = vec![0usize; n];
    let mut dominates_list: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (points[i].as_ref(), points[j].as_ref());
            if dominates(a, b) {
                dominates_list[i].push(j);
                dominated_by_count[j] += 1;
            } else if dominates(b, a) {
                dominates_list[j].push(i);
                dominated_by_count[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates_list[i] {
                dominated_by_count[j] -= 1;
                if dominated_by_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::replace(&mut current, next));
    }
    fronts
}

/// Crowding distance of each point of a front.
///
/// Boundary points of each objective get infinity; interior points add
/// the gap between their two neighbours divided by the objective's range.
/// Only the first occurrence of a repeated objective vector takes part;
/// later copies get 0.
pub fn crowding_distance<T: Scalar, P: AsRef<[T]>>(front: &[P]) -> Vec<T> {
    let n = front.len();
    let mut distance = vec![T::zero(); n];
    let unique: Vec<usize> = (0..n)
        .filter(|&i| !front[..i].iter().any(|p| p.as_ref() == front[i].as_ref()))
        .collect();
    if unique.len() <= 2 {
        for &i in &unique {
            distance[i] = T::infinity();
        }
        return distance;
    }
    let n_obj = front[unique[0]].as_ref().len();
    let mut order = unique.clone();
    for m in 0..n_obj {
        let value = |i: usize| front[i].as_ref()[m];
        order.sort_by(|&a, &b| value(a).partial_cmp(&value(b)).expect("objectives are not NaN"));
        let (first, last) = (order[0], order[order.len() - 1]);
        distance[first] = T::infinity();
        distance[last] = T::infinity();
        let range = value(last) - value(first);
        if range <= T::zero() {
            continue;
        }
        for w in order.windows(3) {
            let gap = (value(w[2]) - value(w[0])) / range;
            distance[w[1]] = distance[w[1]] + gap;
        }
    }
    distance
}

/// Area dominated by a two-objective point set and bounded by `reference`.
/// Points not strictly better than the reference in both objectives
/// contribute nothing.
pub fn hypervolume_2d<T: Scalar, P: AsRef<[T]>>(points: &[P], reference: [T; 2]) -> T {
    let mut pts: Vec<(T, T)> = points
        .iter()
        .map(|p| (p.as_ref()[0], p.as_ref()[1]))
        .filter(|&(a, b)| a < reference[0] && b < reference[1])
        .collect();
    pts.sort_by(|x, y| {
        x.0.partial_cmp(&y.0)
            .expect("objectives are not NaN")
            .then(x.1.partial_cmp(&y.1).expect("objectives are not NaN"))
    });
    let mut area = T::zero();
    let mut ceiling = reference[1];
    for (f1, f2) in pts {
        if f2 < ceiling {
            area = area + (reference[0] - f1) * (ceiling - f2);
            ceiling = f2;
        }
    }
    area
}
