//! Seeded instance generators.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{InstanceFile, Kind, PointList};
use crate::rng::rng_from_seed;

/// Side length of the box generated coordinates lie in.
pub const BOX: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum GenKind {
    /// Clients and facilities uniform in a box.
    EuclideanUniform,
    /// Clients in `k` normal blobs; facilities near blob centers and uniform.
    EuclideanPlanted,
    /// Shortest-path closure of a random connected weighted graph.
    MatrixRandomMetric,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub kind: GenKind,
    pub n: usize,
    /// Facility count; `0` for a continuous Euclidean instance.
    pub m: usize,
    pub dim: usize,
    pub k: usize,
    pub r: f64,
    #[serde(default = "one")]
    pub z: f64,
    pub seed: u64,
}

fn one() -> f64 {
    1.0
}

pub fn generate(p: &GenParams) -> Result<InstanceFile> {
    if p.n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if p.k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let mut rng = rng_from_seed(p.seed);
    let file = match p.kind {
        GenKind::EuclideanUniform | GenKind::EuclideanPlanted => {
            if p.dim == 0 {
                return Err(Error::InvalidArgument("dim must be at least 1".into()));
            }
            let uniform = |rng: &mut crate::rng::SolverRng| -> Vec<f64> {
                (0..p.dim).map(|_| rng.gen_range(0.0..BOX)).collect()
            };
            let (clients, facilities) = if p.kind == GenKind::EuclideanUniform {
                let c: Vec<Vec<f64>> = (0..p.n).map(|_| uniform(&mut rng)).collect();
                let f: Vec<Vec<f64>> = (0..p.m).map(|_| uniform(&mut rng)).collect();
                (c, f)
            } else {
                let centers: Vec<Vec<f64>> = (0..p.k).map(|_| uniform(&mut rng)).collect();
                let noise = Normal::new(0.0, BOX / 20.0).expect("valid deviation");
                let around = |rng: &mut crate::rng::SolverRng, c: &[f64]| -> Vec<f64> {
                    c.iter().map(|x| x + noise.sample(rng)).collect()
                };
                let c: Vec<Vec<f64>> = (0..p.n)
                    .map(|i| around(&mut rng, &centers[i % p.k]))
                    .collect();
                let f: Vec<Vec<f64>> = (0..p.m)
                    .map(|j| {
                        if j < p.m / 2 {
                            around(&mut rng, &centers[j % p.k])
                        } else {
                            uniform(&mut rng)
                        }
                    })
                    .collect();
                (c, f)
            };
            InstanceFile {
                kind: Kind::Euclidean,
                dim: Some(p.dim),
                clients: PointList::Coords(clients),
                facilities: (p.m > 0).then_some(PointList::Coords(facilities)),
                dist: None,
                k: p.k,
                r: p.r,
                z: p.z,
                check_triangle: None,
            }
        }
        GenKind::MatrixRandomMetric => {
            if p.m == 0 {
                return Err(Error::InvalidArgument(
                    "matrix instances need m >= 1".into(),
                ));
            }
            let size = p.n + p.m;
            let mut d = vec![vec![f64::INFINITY; size]; size];
            for (i, row) in d.iter_mut().enumerate() {
                row[i] = 0.0;
            }
            let mut order: Vec<usize> = (0..size).collect();
            order.shuffle(&mut rng);
            let edge = |d: &mut Vec<Vec<f64>>, a: usize, b: usize, w: f64| {
                if w < d[a][b] {
                    d[a][b] = w;
                    d[b][a] = w;
                }
            };
            for w in order.windows(2) {
                let weight = rng.gen_range(1.0..BOX);
                edge(&mut d, w[0], w[1], weight);
            }
            for a in 0..size {
                for b in a + 1..size {
                    if rng.gen_bool(0.3) {
                        let weight = rng.gen_range(1.0..BOX);
                        edge(&mut d, a, b, weight);
                    }
                }
            }
            for via in 0..size {
                for a in 0..size {
                    for b in 0..size {
                        let alt = d[a][via] + d[via][b];
                        if alt < d[a][b] {
                            d[a][b] = alt;
                        }
                    }
                }
            }
            InstanceFile {
                kind: Kind::Matrix,
                dim: None,
                clients: PointList::Indices((0..p.n).collect()),
                facilities: Some(PointList::Indices((p.n..size).collect())),
                dist: Some(d),
                k: p.k,
                r: p.r,
                z: p.z,
                check_triangle: None,
            }
        }
    };
    file.into_instance()?;
    Ok(file)
}
