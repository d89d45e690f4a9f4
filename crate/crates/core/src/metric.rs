//! Metric spaces over clients and facilities, `r`-distances and hybrid costs.
//!
//! Two backends are supported. The Euclidean backend stores coordinates and either
//! a finite facility list or no list at all, in which case every point of `R^dim`
//! is a potential center (the continuous setting). The matrix backend stores a full
//! symmetric distance matrix and addresses clients and facilities by row.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance used for metric validation and derived-threshold comparisons.
pub const TOL: f64 = 1e-9;

/// A point of `P ∪ F` or, in the continuous backend, an arbitrary coordinate vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Site {
    Client(usize),
    Facility(usize),
    Coords(Vec<f64>),
}

#[derive(Clone, Debug)]
enum Backend {
    Euclidean {
        dim: usize,
        clients: Vec<f64>,
        /// `None` means the continuous facility set `R^dim`.
        facilities: Option<Vec<f64>>,
    },
    Matrix {
        size: usize,
        dist: Vec<f64>,
        client_rows: Vec<usize>,
        facility_rows: Vec<usize>,
    },
}

pub(crate) type EuclideanParts = (usize, Vec<Vec<f64>>, Option<Vec<Vec<f64>>>);
pub(crate) type MatrixParts = (Vec<Vec<f64>>, Vec<usize>, Vec<usize>);

/// Clients `P`, facilities `F` and the distance between them. Immutable once built.
#[derive(Clone, Debug)]
pub struct MetricSpace {
    backend: Backend,
    n: usize,
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn flatten(points: &[Vec<f64>], dim: usize, what: &str) -> Result<Vec<f64>> {
    let mut flat = Vec::with_capacity(points.len() * dim);
    for (i, p) in points.iter().enumerate() {
        if p.len() != dim {
            return Err(Error::InvalidInstance(format!(
                "{what} {i} has dimension {} but the space has dimension {dim}",
                p.len()
            )));
        }
        if p.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInstance(format!(
                "{what} {i} has a non-finite coordinate"
            )));
        }
        flat.extend_from_slice(p);
    }
    Ok(flat)
}

impl MetricSpace {
    /// Euclidean space. `facilities = None` selects the continuous facility set.
    pub fn euclidean(
        dim: usize,
        clients: &[Vec<f64>],
        facilities: Option<&[Vec<f64>]>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInstance("dimension must be positive".into()));
        }
        if clients.is_empty() {
            return Err(Error::InvalidInstance(
                "at least one client is required".into(),
            ));
        }
        let flat_clients = flatten(clients, dim, "client")?;
        let flat_facilities = match facilities {
            Some([]) => {
                return Err(Error::InvalidInstance(
                    "an explicit facility list must be nonempty".into(),
                ))
            }
            Some(f) => Some(flatten(f, dim, "facility")?),
            None => None,
        };
        Ok(Self {
            n: clients.len(),
            backend: Backend::Euclidean {
                dim,
                clients: flat_clients,
                facilities: flat_facilities,
            },
        })
    }

    /// Matrix space. `client_rows` and `facility_rows` index into `dist`; rows may be
    /// shared when a facility coincides with a client.
    pub fn matrix(
        dist: &[Vec<f64>],
        client_rows: Vec<usize>,
        facility_rows: Vec<usize>,
        check_triangle: bool,
    ) -> Result<Self> {
        let size = dist.len();
        if client_rows.is_empty() {
            return Err(Error::InvalidInstance(
                "at least one client is required".into(),
            ));
        }
        if facility_rows.is_empty() {
            return Err(Error::InvalidInstance(
                "at least one facility is required".into(),
            ));
        }
        if let Some(bad) = client_rows
            .iter()
            .chain(&facility_rows)
            .find(|&&i| i >= size)
        {
            return Err(Error::InvalidInstance(format!(
                "row index {bad} out of range for a {size}x{size} matrix"
            )));
        }
        let mut flat = Vec::with_capacity(size * size);
        for (i, row) in dist.iter().enumerate() {
            if row.len() != size {
                return Err(Error::InvalidInstance(format!(
                    "row {i} has {} entries, expected {size}",
                    row.len()
                )));
            }
            flat.extend_from_slice(row);
        }
        for i in 0..size {
            if flat[i * size + i].abs() > TOL {
                return Err(Error::InvalidInstance(format!("nonzero diagonal at {i}")));
            }
            for j in 0..size {
                let v = flat[i * size + j];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidInstance(format!(
                        "entry ({i},{j}) = {v} is not a finite nonnegative distance"
                    )));
                }
                if (v - flat[j * size + i]).abs() > TOL {
                    return Err(Error::InvalidInstance(format!(
                        "asymmetric entry ({i},{j})"
                    )));
                }
            }
        }
        if check_triangle {
            for a in 0..size {
                for b in 0..size {
                    let ab = flat[a * size + b];
                    for c in 0..size {
                        if ab > flat[a * size + c] + flat[c * size + b] + TOL {
                            return Err(Error::InvalidInstance(format!(
                                "triangle inequality violated: d({a},{b}) > d({a},{c}) + d({c},{b})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(Self {
            n: client_rows.len(),
            backend: Backend::Matrix {
                size,
                dist: flat,
                client_rows,
                facility_rows,
            },
        })
    }

    /// Number of clients `n = |P|`.
    pub fn n_clients(&self) -> usize {
        self.n
    }

    /// Number of facilities, or `None` for the continuous backend.
    pub fn n_facilities(&self) -> Option<usize> {
        match &self.backend {
            Backend::Euclidean {
                dim, facilities, ..
            } => facilities.as_ref().map(|f| f.len() / dim),
            Backend::Matrix { facility_rows, .. } => Some(facility_rows.len()),
        }
    }

    /// True when the facility set is finite.
    pub fn is_discrete(&self) -> bool {
        self.n_facilities().is_some()
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self.backend, Backend::Euclidean { .. })
    }

    pub fn dim(&self) -> Option<usize> {
        match &self.backend {
            Backend::Euclidean { dim, .. } => Some(*dim),
            Backend::Matrix { .. } => None,
        }
    }

    pub fn client_coords(&self, p: usize) -> Option<&[f64]> {
        match &self.backend {
            Backend::Euclidean { dim, clients, .. } => clients.get(p * dim..(p + 1) * dim),
            Backend::Matrix { .. } => None,
        }
    }

    pub fn facility_coords(&self, f: usize) -> Option<&[f64]> {
        match &self.backend {
            Backend::Euclidean {
                dim,
                facilities: Some(fac),
                ..
            } => fac.get(f * dim..(f + 1) * dim),
            _ => None,
        }
    }

    /// Same clients, with the facility set replaced by a finite coordinate list.
    /// Used to restrict a continuous instance to a candidate grid.
    pub fn with_candidate_facilities(&self, candidates: &[Vec<f64>]) -> Result<Self> {
        match &self.backend {
            Backend::Euclidean { dim, clients, .. } => {
                let pts: Vec<Vec<f64>> = clients.chunks(*dim).map(<[f64]>::to_vec).collect();
                Self::euclidean(*dim, &pts, Some(candidates))
            }
            Backend::Matrix { .. } => Err(Error::Unsupported(
                "candidate facilities require the euclidean backend".into(),
            )),
        }
    }

    /// Checks that a site refers to an existing point of this space.
    pub fn check_site(&self, s: &Site) -> Result<()> {
        match (s, &self.backend) {
            (Site::Client(i), _) if *i < self.n => Ok(()),
            (Site::Client(i), _) => Err(Error::InvalidPoint(format!("client {i} out of range"))),
            (Site::Facility(f), _) => match self.n_facilities() {
                Some(m) if *f < m => Ok(()),
                Some(_) => Err(Error::InvalidPoint(format!("facility {f} out of range"))),
                None => Err(Error::InvalidPoint(
                    "continuous spaces have no indexed facilities".into(),
                )),
            },
            (Site::Coords(c), Backend::Euclidean { dim, .. }) if c.len() == *dim => Ok(()),
            (Site::Coords(c), Backend::Euclidean { dim, .. }) => Err(Error::InvalidPoint(format!(
                "coordinate vector of length {} in a {dim}-dimensional space",
                c.len()
            ))),
            (Site::Coords(_), Backend::Matrix { .. }) => Err(Error::InvalidPoint(
                "coordinates are not meaningful in a matrix space".into(),
            )),
        }
    }

    /// Checks that a site may serve as a center (a facility, or coordinates in a continuous space).
    pub fn check_center(&self, s: &Site) -> Result<()> {
        self.check_site(s)?;
        match s {
            Site::Facility(_) => Ok(()),
            Site::Coords(_) if !self.is_discrete() => Ok(()),
            Site::Coords(_) => Err(Error::InvalidPoint(
                "this space has a finite facility set; use a facility index".into(),
            )),
            Site::Client(i) => Err(Error::InvalidPoint(format!("client {i} is not a facility"))),
        }
    }

    /// Distance between two sites.
    pub fn distance(&self, a: &Site, b: &Site) -> Result<f64> {
        self.check_site(a)?;
        self.check_site(b)?;
        Ok(self.dist_unchecked(a, b))
    }

    fn row(&self, s: &Site) -> usize {
        match (&self.backend, s) {
            (Backend::Matrix { client_rows, .. }, Site::Client(i)) => client_rows[*i],
            (Backend::Matrix { facility_rows, .. }, Site::Facility(f)) => facility_rows[*f],
            _ => unreachable!("row lookup on a non-matrix site"),
        }
    }

    fn coords<'a>(&'a self, s: &'a Site) -> &'a [f64] {
        match s {
            Site::Client(i) => self.client_coords(*i).expect("validated client"),
            Site::Facility(f) => self.facility_coords(*f).expect("validated facility"),
            Site::Coords(c) => c,
        }
    }

    pub(crate) fn dist_unchecked(&self, a: &Site, b: &Site) -> f64 {
        match &self.backend {
            Backend::Euclidean { .. } => euclid(self.coords(a), self.coords(b)),
            Backend::Matrix { size, dist, .. } => dist[self.row(a) * size + self.row(b)],
        }
    }

    /// Distance between clients `p` and `q`.
    pub fn client_dist(&self, p: usize, q: usize) -> f64 {
        match &self.backend {
            Backend::Euclidean { dim, clients, .. } => euclid(
                &clients[p * dim..(p + 1) * dim],
                &clients[q * dim..(q + 1) * dim],
            ),
            Backend::Matrix {
                size,
                dist,
                client_rows,
                ..
            } => dist[client_rows[p] * size + client_rows[q]],
        }
    }

    /// Distance between client `p` and an arbitrary site.
    pub fn client_site_dist(&self, p: usize, s: &Site) -> f64 {
        self.dist_unchecked(&Site::Client(p), s)
    }

    /// Closed ball: every client `q` with `d(center, q) <= alpha`.
    pub fn ball(&self, center: &Site, alpha: f64) -> Result<Vec<usize>> {
        self.check_site(center)?;
        Ok((0..self.n)
            .filter(|&q| self.client_site_dist(q, center) <= alpha)
            .collect())
    }

    /// Every facility as a site (empty for the continuous backend).
    pub fn facility_sites(&self) -> Vec<Site> {
        (0..self.n_facilities().unwrap_or(0))
            .map(Site::Facility)
            .collect()
    }

    /// Largest distance between two clients.
    pub fn client_diameter(&self) -> f64 {
        let mut best = 0.0f64;
        for p in 0..self.n {
            for q in p + 1..self.n {
                best = best.max(self.client_dist(p, q));
            }
        }
        best
    }

    /// Raw coordinates for serialization: `(dim, clients, facilities)`.
    pub(crate) fn euclidean_parts(&self) -> Option<EuclideanParts> {
        match &self.backend {
            Backend::Euclidean {
                dim,
                clients,
                facilities,
            } => Some((
                *dim,
                clients.chunks(*dim).map(<[f64]>::to_vec).collect(),
                facilities
                    .as_ref()
                    .map(|f| f.chunks(*dim).map(<[f64]>::to_vec).collect()),
            )),
            Backend::Matrix { .. } => None,
        }
    }

    /// Raw matrix for serialization: `(dist, client_rows, facility_rows)`.
    pub(crate) fn matrix_parts(&self) -> Option<MatrixParts> {
        match &self.backend {
            Backend::Matrix {
                size,
                dist,
                client_rows,
                facility_rows,
            } => Some((
                dist.chunks(*size).map(<[f64]>::to_vec).collect(),
                client_rows.clone(),
                facility_rows.clone(),
            )),
            Backend::Euclidean { .. } => None,
        }
    }
}

/// An instance: a metric space, the number of clusters `k`, the radius `r` and the power `z`.
#[derive(Clone, Debug)]
pub struct Instance {
    pub space: MetricSpace,
    pub k: usize,
    pub r: f64,
    pub z: f64,
}

impl Instance {
    pub fn new(space: MetricSpace, k: usize, r: f64, z: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidInstance("k must be at least 1".into()));
        }
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::InvalidInstance(format!(
                "radius {r} must be finite and >= 0"
            )));
        }
        if !(z.is_finite() && z >= 1.0) {
            return Err(Error::InvalidInstance(format!(
                "power {z} must be finite and >= 1"
            )));
        }
        Ok(Self { space, k, r, z })
    }
}

/// A set of at most `k` centers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    centers: Vec<Site>,
}

impl Solution {
    pub fn new(space: &MetricSpace, centers: Vec<Site>, k: usize) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::EmptySolution);
        }
        if centers.len() > k {
            return Err(Error::InvalidArgument(format!(
                "{} centers exceed k = {k}",
                centers.len()
            )));
        }
        for c in &centers {
            space.check_center(c)?;
        }
        Ok(Self { centers })
    }

    /// Facility-index solution for a discrete space.
    pub fn from_facilities(space: &MetricSpace, facilities: &[usize], k: usize) -> Result<Self> {
        Self::new(
            space,
            facilities.iter().copied().map(Site::Facility).collect(),
            k,
        )
    }

    pub fn centers(&self) -> &[Site] {
        &self.centers
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn into_centers(self) -> Vec<Site> {
        self.centers
    }
}

/// Clients with positive integer multiplicities.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WeightedClientSet {
    members: Vec<(usize, u64)>,
}

impl WeightedClientSet {
    pub fn new(space: &MetricSpace, members: Vec<(usize, u64)>) -> Result<Self> {
        let n = space.n_clients();
        let mut seen = vec![false; n];
        let mut total = 0u64;
        for &(p, w) in &members {
            if p >= n {
                return Err(Error::InvalidPoint(format!("client {p} out of range")));
            }
            if seen[p] {
                return Err(Error::InvalidArgument(format!("client {p} listed twice")));
            }
            if w == 0 {
                return Err(Error::InvalidArgument(format!(
                    "client {p} has zero weight"
                )));
            }
            seen[p] = true;
            total += w;
        }
        if total > n as u64 {
            return Err(Error::InvalidArgument(format!(
                "total weight {total} exceeds the client count {n}"
            )));
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[(usize, u64)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn total_weight(&self) -> u64 {
        self.members.iter().map(|&(_, w)| w).sum()
    }
}

/// `max(d - alpha, 0)`.
#[inline]
pub fn alpha_distance(d: f64, alpha: f64) -> f64 {
    (d - alpha).max(0.0)
}

#[inline]
pub(crate) fn pow_z(x: f64, z: f64) -> f64 {
    if z == 1.0 {
        x
    } else {
        x.powf(z)
    }
}

/// `d(p, X)` without validation; `centers` must be nonempty.
pub(crate) fn nearest_dist(space: &MetricSpace, p: usize, centers: &[Site]) -> f64 {
    centers
        .iter()
        .map(|c| space.client_site_dist(p, c))
        .fold(f64::INFINITY, f64::min)
}

/// `d_alpha(p, X) = max(min_{x in X} d(p, x) - alpha, 0)`.
pub fn point_set_alpha_distance(
    space: &MetricSpace,
    p: usize,
    centers: &[Site],
    alpha: f64,
) -> Result<f64> {
    if centers.is_empty() {
        return Err(Error::EmptySolution);
    }
    if p >= space.n_clients() {
        return Err(Error::InvalidPoint(format!("client {p} out of range")));
    }
    for c in centers {
        space.check_site(c)?;
    }
    Ok(alpha_distance(nearest_dist(space, p, centers), alpha))
}

/// `sum_{p in P} d_alpha(p, X)^z`.
pub fn cost(space: &MetricSpace, centers: &[Site], alpha: f64, z: f64) -> Result<f64> {
    if centers.is_empty() {
        return Err(Error::EmptySolution);
    }
    for c in centers {
        space.check_site(c)?;
    }
    Ok(cost_unchecked(space, centers, alpha, z))
}

pub(crate) fn cost_unchecked(space: &MetricSpace, centers: &[Site], alpha: f64, z: f64) -> f64 {
    (0..space.n_clients())
        .map(|p| pow_z(alpha_distance(nearest_dist(space, p, centers), alpha), z))
        .sum()
}

/// `sum_{(p, w) in P'} w * d_alpha(p, X)^z`.
pub fn weighted_cost(
    space: &MetricSpace,
    clients: &WeightedClientSet,
    centers: &[Site],
    alpha: f64,
    z: f64,
) -> Result<f64> {
    if centers.is_empty() {
        return Err(Error::EmptySolution);
    }
    for c in centers {
        space.check_site(c)?;
    }
    Ok(clients
        .members()
        .iter()
        .map(|&(p, w)| w as f64 * pow_z(alpha_distance(nearest_dist(space, p, centers), alpha), z))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(points: &[f64]) -> MetricSpace {
        let pts: Vec<Vec<f64>> = points.iter().map(|&x| vec![x]).collect();
        MetricSpace::euclidean(1, &pts, Some(&pts)).unwrap()
    }

    fn small_matrix() -> MetricSpace {
        // rows 0..3 clients, 3..5 facilities
        let d = vec![
            vec![0.0, 2.0, 4.0, 1.0, 7.0],
            vec![2.0, 0.0, 2.0, 3.0, 5.0],
            vec![4.0, 2.0, 0.0, 5.0, 3.0],
            vec![1.0, 3.0, 5.0, 0.0, 8.0],
            vec![7.0, 5.0, 3.0, 8.0, 0.0],
        ];
        MetricSpace::matrix(&d, vec![0, 1, 2], vec![3, 4], true).unwrap()
    }

    #[test]
    fn pythagorean_distance() {
        let s = MetricSpace::euclidean(2, &[vec![0.0, 0.0]], Some(&[vec![3.0, 4.0]])).unwrap();
        assert_eq!(
            s.distance(&Site::Client(0), &Site::Facility(0)).unwrap(),
            5.0
        );
        assert_eq!(
            s.distance(&Site::Coords(vec![0.0, 0.0]), &Site::Coords(vec![3.0, 4.0]))
                .unwrap(),
            5.0
        );
    }

    #[test]
    fn matrix_lookup_and_diagonal() {
        let s = small_matrix();
        assert_eq!(s.distance(&Site::Client(1), &Site::Client(1)).unwrap(), 0.0);
        // client 1 is row 1, facility 1 is row 4
        assert_eq!(
            s.distance(&Site::Client(1), &Site::Facility(1)).unwrap(),
            5.0
        );
        assert_eq!(
            s.distance(&Site::Facility(1), &Site::Client(0)).unwrap(),
            7.0
        );
    }

    #[test]
    fn out_of_range_points_are_rejected() {
        let s = small_matrix();
        assert!(matches!(
            s.distance(&Site::Client(3), &Site::Client(0)),
            Err(Error::InvalidPoint(_))
        ));
        assert!(matches!(
            s.distance(&Site::Facility(2), &Site::Client(0)),
            Err(Error::InvalidPoint(_))
        ));
        assert!(s.check_site(&Site::Coords(vec![0.0])).is_err());
    }

    #[test]
    fn matrix_validation() {
        let asym = vec![vec![0.0, 1.0], vec![2.0, 0.0]];
        assert!(MetricSpace::matrix(&asym, vec![0], vec![1], true).is_err());
        let diag = vec![vec![0.5, 1.0], vec![1.0, 0.0]];
        assert!(MetricSpace::matrix(&diag, vec![0], vec![1], true).is_err());
        let tri = vec![
            vec![0.0, 1.0, 5.0],
            vec![1.0, 0.0, 1.0],
            vec![5.0, 1.0, 0.0],
        ];
        assert!(MetricSpace::matrix(&tri, vec![0, 1], vec![2], true).is_err());
        assert!(MetricSpace::matrix(&tri, vec![0, 1], vec![2], false).is_ok());
        assert!(MetricSpace::matrix(&tri, vec![0, 3], vec![2], false).is_err());
    }

    #[test]
    fn euclidean_validation() {
        assert!(MetricSpace::euclidean(2, &[vec![0.0]], None).is_err());
        assert!(MetricSpace::euclidean(2, &[], None).is_err());
        assert!(MetricSpace::euclidean(1, &[vec![0.0]], Some(&[])).is_err());
        assert!(MetricSpace::euclidean(1, &[vec![f64::NAN]], None).is_err());
        let c = MetricSpace::euclidean(1, &[vec![0.0]], None).unwrap();
        assert!(!c.is_discrete());
        assert!(c.check_center(&Site::Coords(vec![2.0])).is_ok());
        assert!(c.check_center(&Site::Facility(0)).is_err());
    }

    #[test]
    fn alpha_distance_examples() {
        assert_eq!(alpha_distance(5.0, 3.0), 2.0);
        assert_eq!(alpha_distance(2.0, 3.0), 0.0);
        assert_eq!(alpha_distance(3.0, 3.0), 0.0);
    }

    #[test]
    fn point_set_alpha_distance_examples() {
        // client 0 at distances 4 and 9 from the two facilities
        let s = MetricSpace::euclidean(1, &[vec![0.0]], Some(&[vec![4.0], vec![-9.0]])).unwrap();
        let x = [Site::Facility(0), Site::Facility(1)];
        assert_eq!(point_set_alpha_distance(&s, 0, &x, 3.0).unwrap(), 1.0);
        assert_eq!(point_set_alpha_distance(&s, 0, &x, 0.0).unwrap(), 4.0);
        let co = MetricSpace::euclidean(1, &[vec![4.0]], Some(&[vec![4.0]])).unwrap();
        assert_eq!(
            point_set_alpha_distance(&co, 0, &[Site::Facility(0)], 0.0).unwrap(),
            0.0
        );
        assert!(matches!(
            point_set_alpha_distance(&s, 0, &[], 1.0),
            Err(Error::EmptySolution)
        ));
    }

    #[test]
    fn cost_examples() {
        // clients at distance 1, 5, 6 from the single facility at the origin
        let s = MetricSpace::euclidean(1, &[vec![1.0], vec![5.0], vec![-6.0]], Some(&[vec![0.0]]))
            .unwrap();
        let x = [Site::Facility(0)];
        assert_eq!(cost(&s, &x, 2.0, 2.0).unwrap(), 25.0);
        assert_eq!(cost(&s, &x, 0.0, 1.0).unwrap(), 12.0);
        assert_eq!(cost(&s, &x, 6.0, 1.0).unwrap(), 0.0);
        assert_eq!(cost(&s, &x, 100.0, 3.0).unwrap(), 0.0);
        assert!(cost(&s, &[], 0.0, 1.0).is_err());
    }

    #[test]
    fn weighted_cost_matches_expanded_cost() {
        let s = line(&[0.0, 0.0, 3.0]);
        let w = WeightedClientSet::new(&s, vec![(0, 2), (2, 1)]).unwrap();
        let x = [Site::Facility(2)];
        assert_eq!(
            weighted_cost(&s, &w, &x, 1.0, 1.0).unwrap(),
            cost(&s, &x, 1.0, 1.0).unwrap()
        );
        assert!(WeightedClientSet::new(&s, vec![(0, 4)]).is_err());
        assert!(WeightedClientSet::new(&s, vec![(0, 1), (0, 1)]).is_err());
        assert!(WeightedClientSet::new(&s, vec![(0, 0)]).is_err());
    }

    #[test]
    fn ball_examples() {
        let s = line(&[0.0, 1.0, 2.0, 3.0]);
        assert_eq!(s.ball(&Site::Client(0), 1.5).unwrap(), vec![0, 1]);
        assert_eq!(s.ball(&Site::Client(0), 0.0).unwrap(), vec![0]);
        assert_eq!(s.ball(&Site::Client(0), 1.0).unwrap(), vec![0, 1]);
        assert_eq!(
            s.ball(&Site::Client(2), s.client_diameter()).unwrap(),
            vec![0, 1, 2, 3]
        );
        let dup = line(&[0.0, 0.0, 5.0]);
        assert_eq!(dup.ball(&Site::Facility(0), 0.0).unwrap(), vec![0, 1]);
    }

    #[test]
    fn solution_validation() {
        let s = small_matrix();
        assert!(Solution::from_facilities(&s, &[0, 1], 2).is_ok());
        assert!(Solution::from_facilities(&s, &[0, 1], 1).is_err());
        assert!(Solution::from_facilities(&s, &[2], 1).is_err());
        assert!(Solution::new(&s, vec![Site::Client(0)], 1).is_err());
        assert!(matches!(
            Solution::new(&s, vec![], 1),
            Err(Error::EmptySolution)
        ));
    }
}
