//! Geometric permutations and connected components of the space of
//! transversal directions.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{sample_directions, transversal_status};
use crate::error::Result;
use crate::geom::sphere::{great_circle_point, lattice_spacing};
use crate::geom::{Direction, MinimaxOptions, OrderOutcome, Scene, DEFAULT_TIE_FACTOR};

/// Neighbor radius of the sample graph, in lattice spacings.
pub const COMPONENT_RADIUS_FACTOR: f64 = 2.5;
/// Components with fewer samples than this are flagged.
const UNDERSAMPLED: usize = 10;

/// An order and its reverse, stored once.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometricPermutation {
    /// The lexicographically smaller of the two orientations.
    pub order: Vec<usize>,
    /// A direction realizing `order`.
    pub witness: Direction,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PermutationCatalog {
    pub permutations: Vec<GeometricPermutation>,
    pub samples: usize,
    pub feasible_samples: usize,
    pub seed: u64,
}

impl PermutationCatalog {
    pub fn len(&self) -> usize {
        self.permutations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.permutations.is_empty()
    }

    pub fn contains(&self, order: &[usize]) -> bool {
        let c = canonical(order);
        self.permutations.iter().any(|p| p.order == c)
    }
}

pub(crate) fn canonical(order: &[usize]) -> Vec<usize> {
    let rev: Vec<usize> = order.iter().rev().copied().collect();
    if rev.as_slice() < order {
        rev
    } else {
        order.to_vec()
    }
}

struct FeasibleSample {
    direction: Direction,
    order: Vec<usize>,
}

fn feasible_samples(scene: &Scene, samples: usize, seed: u64, opts: &MinimaxOptions) -> Result<Vec<FeasibleSample>> {
    let tie = DEFAULT_TIE_FACTOR * scene.diameter();
    let dirs = sample_directions(scene.dimension(), samples, seed);
    let rows: Vec<Option<FeasibleSample>> = dirs
        .into_par_iter()
        .map(|u| {
            let (slack, order, _) = transversal_status(scene, &u, tie, opts)?;
            Ok(match order {
                OrderOutcome::Strict(o) if slack <= opts.tol => Some(FeasibleSample { direction: u, order: o }),
                _ => None,
            })
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

fn catalog_from(samples: &[FeasibleSample], total: usize, seed: u64) -> PermutationCatalog {
    let mut map: BTreeMap<Vec<usize>, GeometricPermutation> = BTreeMap::new();
    for s in samples {
        let c = canonical(&s.order);
        let entry = map.entry(c.clone()).or_insert_with(|| GeometricPermutation {
            order: c.clone(),
            witness: if c == s.order {
                s.direction.clone()
            } else {
                s.direction.antipode()
            },
            samples: 0,
        });
        entry.samples += 1;
    }
    PermutationCatalog {
        permutations: map.into_values().collect(),
        samples: total,
        feasible_samples: samples.len(),
        seed,
    }
}

/// Distinct geometric permutations seen on a seeded direction lattice.
pub fn enumerate_geometric_permutations(
    scene: &Scene,
    samples: usize,
    seed: u64,
    opts: &MinimaxOptions,
) -> Result<PermutationCatalog> {
    let found = feasible_samples(scene, samples, seed, opts)?;
    Ok(catalog_from(&found, samples, seed))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentReport {
    pub components: usize,
    pub sizes: Vec<usize>,
    /// Canonical orders seen in each component.
    pub permutations: Vec<Vec<Vec<usize>>>,
    pub catalog: PermutationCatalog,
    pub undersampled: bool,
    pub spacing: f64,
    pub radius: f64,
    /// Merges justified by a feasible great-circle path rather than by
    /// sample proximity.
    pub path_merges: usize,
}

impl ComponentReport {
    /// Components and geometric permutations agree, and no component mixes
    /// two permutations.
    pub fn matches_permutations(&self) -> bool {
        self.components == self.catalog.len() && self.permutations.iter().all(|p| p.len() == 1)
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra] = rb;
        }
        ra != rb
    }
}

/// Spatial hash holding each sample and its antipode under the same id.
struct ProjectiveGrid {
    cell: f64,
    cells: HashMap<Vec<i64>, Vec<(usize, Vec<f64>)>>,
}

impl ProjectiveGrid {
    fn new(cell: f64, points: &[Direction]) -> Self {
        let mut g = Self {
            cell,
            cells: HashMap::new(),
        };
        for (id, u) in points.iter().enumerate() {
            for p in [u.components().to_vec(), u.antipode().components().to_vec()] {
                g.cells.entry(g.key(&p)).or_default().push((id, p));
            }
        }
        g
    }

    fn key(&self, p: &[f64]) -> Vec<i64> {
        p.iter().map(|x| (x / self.cell).floor() as i64).collect()
    }

    /// Ids within chordal distance `chord` of `p` (some may repeat).
    fn near(&self, p: &[f64], chord: f64, out: &mut Vec<usize>) {
        out.clear();
        let base = self.key(p);
        let d = base.len();
        let reach = (chord / self.cell).ceil() as i64;
        let width = (2 * reach + 1) as usize;
        let mut offset = vec![0usize; d];
        loop {
            let key: Vec<i64> = base.iter().zip(&offset).map(|(b, o)| b + *o as i64 - reach).collect();
            if let Some(list) = self.cells.get(&key) {
                for (id, q) in list {
                    let dist2: f64 = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
                    if dist2 <= chord * chord {
                        out.push(*id);
                    }
                }
            }
            let mut k = 0;
            loop {
                if k == d {
                    return;
                }
                offset[k] += 1;
                if offset[k] < width {
                    break;
                }
                offset[k] = 0;
                k += 1;
            }
        }
    }
}

fn chord(angle: f64) -> f64 {
    2.0 * (0.5 * angle).sin()
}

/// Components of the set of transversal directions, taken in projective
/// space so that `u` and `-u` are identified.
///
/// Samples closer than `COMPONENT_RADIUS_FACTOR` lattice spacings are joined.
/// Nearby components are also joined when the great-circle path between
/// them is feasible throughout, which repairs thin cones the lattice cuts
/// into pieces.
pub fn count_components(scene: &Scene, samples: usize, seed: u64, opts: &MinimaxOptions) -> Result<ComponentReport> {
    let found = feasible_samples(scene, samples, seed, opts)?;
    let catalog = catalog_from(&found, samples, seed);
    let d = scene.dimension();
    let spacing = lattice_spacing(d, samples);
    let radius = COMPONENT_RADIUS_FACTOR * spacing;
    let points: Vec<Direction> = found.iter().map(|s| s.direction.clone()).collect();
    let mut uf = UnionFind((0..points.len()).collect());

    let grid = ProjectiveGrid::new(chord(radius), &points);
    let mut near = Vec::new();
    for (i, u) in points.iter().enumerate() {
        grid.near(u.components(), chord(radius), &mut near);
        for &j in &near {
            uf.union(i, j);
        }
    }

    // path repair between components that come close
    let tie = DEFAULT_TIE_FACTOR * scene.diameter();
    let far = 3.0 * radius;
    let wide = ProjectiveGrid::new(chord(far), &points);
    let mut tried: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut path_merges = 0;
    for (i, u) in points.iter().enumerate() {
        wide.near(u.components(), chord(far), &mut near);
        for &j in &near {
            let (ri, rj) = (uf.find(i), uf.find(j));
            if ri == rj || !tried.insert((ri.min(rj), ri.max(rj))) {
                continue;
            }
            let v = if u.angle_to(&points[j]) > std::f64::consts::FRAC_PI_2 {
                points[j].antipode()
            } else {
                points[j].clone()
            };
            let steps = ((u.angle_to(&v) / (0.25 * spacing)).ceil() as usize).max(2);
            let mut ok = true;
            for k in 1..steps {
                let Some(w) = great_circle_point(u, &v, k as f64 / steps as f64) else {
                    ok = false;
                    break;
                };
                let (slack, order, _) = transversal_status(scene, &w, tie, opts)?;
                if slack > opts.tol || order.strict().is_none() {
                    ok = false;
                    break;
                }
            }
            if ok && uf.union(i, j) {
                path_merges += 1;
            }
        }
    }

    let mut groups: BTreeMap<usize, (usize, BTreeSet<Vec<usize>>)> = BTreeMap::new();
    for (i, s) in found.iter().enumerate() {
        let r = uf.find(i);
        let entry = groups.entry(r).or_default();
        entry.0 += 1;
        entry.1.insert(canonical(&s.order));
    }
    let sizes: Vec<usize> = groups.values().map(|g| g.0).collect();
    let permutations = groups.values().map(|g| g.1.iter().cloned().collect()).collect();
    Ok(ComponentReport {
        components: groups.len(),
        undersampled: sizes.iter().any(|&s| s < UNDERSAMPLED),
        sizes,
        permutations,
        catalog,
        spacing,
        radius,
        path_merges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Ball;

    #[test]
    fn canonical_picks_smaller_orientation() {
        assert_eq!(canonical(&[2, 1, 0]), vec![0, 1, 2]);
        assert_eq!(canonical(&[1, 0, 2]), vec![1, 0, 2]);
        assert_eq!(canonical(&[2, 0, 1]), vec![1, 0, 2]);
    }

    #[test]
    fn two_far_balls_have_one_permutation_and_component() {
        let scene = Scene::new(
            3,
            vec![
                Ball::new(vec![0.0, 0.0, 0.0], 1.0).unwrap(),
                Ball::new(vec![5.0, 0.0, 0.0], 1.0).unwrap(),
            ],
        )
        .unwrap();
        let r = count_components(&scene, 4000, 3, &MinimaxOptions::default()).unwrap();
        assert_eq!(r.components, 1);
        assert_eq!(r.catalog.len(), 1);
        assert!(r.matches_permutations());
    }
}
