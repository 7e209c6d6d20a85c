//! Graphs obtained by gluing the endpoints of `Ω`, and the maps they induce.
//!
//! Points of the graph `G` are represented by rationals of `Ω`: an interior
//! point stands for itself and a glued class of endpoints is named by its
//! smallest member (see [`GluedGraph::canonical`]).

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::chain::FormalVector;
use crate::linalg::QMatrix;
use crate::pm_domain::{MapError, Omega, PMMap, Side};
use crate::rational::Rational;
use crate::roots;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("{0} is not an endpoint of Ω")]
    UnknownBoundaryPoint(Rational),
    #[error("endpoint {0} appears in more than one gluing class")]
    DuplicateBoundaryPoint(Rational),
    #[error("the gluing was built for a different domain")]
    DomainMismatch,
    #[error("inconsistent gluing at {point}: one-sided images {images:?} are different points of the graph")]
    InconsistentGluing { point: Rational, images: Vec<Rational> },
    #[error("image of cycle {cycle} has nonzero coefficient {coeff} at the non-boundary point {point}")]
    InteriorResidue { cycle: usize, point: Rational, coeff: Rational },
    #[error("image of cycle {cycle} is not a combination of basis cycles")]
    NotInCycleSpace { cycle: usize },
    #[error(transparent)]
    Map(#[from] MapError),
}

/// A partition of `∂Ω` into classes of identified endpoints. Endpoints not
/// mentioned in any class stay on their own.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gluing {
    classes: Vec<Vec<Rational>>,
}

impl Gluing {
    pub fn new(omega: &Omega, classes: &[Vec<Rational>]) -> Result<Self, GraphError> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for class in classes {
            let mut members = Vec::with_capacity(class.len());
            for x in class {
                if !omega.is_boundary(x) {
                    return Err(GraphError::UnknownBoundaryPoint(x.clone()));
                }
                if !seen.insert(x.clone()) {
                    return Err(GraphError::DuplicateBoundaryPoint(x.clone()));
                }
                members.push(x.clone());
            }
            if !members.is_empty() {
                members.sort();
                out.push(members);
            }
        }
        for x in omega.boundary() {
            if !seen.contains(&x) {
                out.push(vec![x]);
            }
        }
        out.sort();
        Ok(Self { classes: out })
    }

    /// No identifications: `G` is `Ω` itself.
    pub fn discrete(omega: &Omega) -> Self {
        Self::new(omega, &[]).expect("no classes to check")
    }

    /// All classes, including singletons, each sorted, ordered by smallest member.
    pub fn classes(&self) -> &[Vec<Rational>] {
        &self.classes
    }

    pub fn class_index(&self, x: &Rational) -> Option<usize> {
        self.classes.iter().position(|c| c.binary_search(x).is_ok())
    }
}

/// Integer basis of the cycle space, i.e. of the kernel of the boundary map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleBasis {
    /// One integer vector per basis cycle, indexed by edge.
    #[serde(serialize_with = "serialize_bigints")]
    pub cycles: Vec<Vec<BigInt>>,
    /// For cycle `k`, the edge where it is the only nonzero basis vector.
    pub pivots: Vec<usize>,
}

fn serialize_bigints<S: serde::Serializer>(v: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for row in v {
        let row: Vec<String> = row.iter().map(ToString::to_string).collect();
        seq.serialize_element(&row)?;
    }
    seq.end()
}

impl CycleBasis {
    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    /// Coordinates of an edge vector in the basis, if it lies in the span.
    pub fn coordinates(&self, mu: &[Rational]) -> Option<Vec<Rational>> {
        let coords: Vec<Rational> =
            self.cycles.iter().zip(&self.pivots).map(|(c, &p)| &mu[p] / Rational::from_integer(c[p].clone())).collect();
        let mut rebuilt = vec![Rational::zero(); mu.len()];
        for (c, k) in self.cycles.iter().zip(&coords) {
            for (r, x) in rebuilt.iter_mut().zip(c) {
                *r += k * Rational::from_integer(x.clone());
            }
        }
        (rebuilt == mu).then_some(coords)
    }
}

/// The graph `G = Ω / gluing`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GluedGraph {
    omega: Omega,
    gluing: Gluing,
    /// `(class of a_i, class of b_i)` for each interval.
    edges: Vec<(usize, usize)>,
    valence: Vec<usize>,
    /// Connected component of each class.
    class_component: Vec<usize>,
    components: usize,
    cycles: CycleBasis,
}

pub fn build_graph(omega: &Omega, classes: &[Vec<Rational>]) -> Result<GluedGraph, GraphError> {
    let gluing = Gluing::new(omega, classes)?;
    Ok(GluedGraph::from_gluing(omega, gluing))
}

impl GluedGraph {
    pub fn from_gluing(omega: &Omega, gluing: Gluing) -> Self {
        let idx = |x: &Rational| gluing.class_index(x).expect("every endpoint has a class");
        let edges: Vec<(usize, usize)> = omega.intervals().iter().map(|(a, b)| (idx(a), idx(b))).collect();
        let v = gluing.classes().len();
        let mut valence = vec![0; v];
        for &(s, t) in &edges {
            valence[s] += 1;
            valence[t] += 1;
        }

        // union-find over classes
        let mut parent: Vec<usize> = (0..v).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(s, t) in &edges {
            let (rs, rt) = (find(&mut parent, s), find(&mut parent, t));
            if rs != rt {
                parent[rs.max(rt)] = rs.min(rt);
            }
        }
        let mut label = BTreeMap::new();
        let class_component: Vec<usize> = (0..v)
            .map(|x| {
                let r = find(&mut parent, x);
                let next = label.len();
                *label.entry(r).or_insert(next)
            })
            .collect();
        let components = label.len();

        let mut boundary = QMatrix::zeros(v, edges.len());
        for (i, &(s, t)) in edges.iter().enumerate() {
            let x = boundary.get(t, i) + Rational::one();
            boundary.set(t, i, x);
            let x = boundary.get(s, i) - Rational::one();
            boundary.set(s, i, x);
        }
        let (_, pivot_cols) = boundary.rref();
        let free: Vec<usize> = (0..edges.len()).filter(|c| !pivot_cols.contains(c)).collect();
        let cycles = boundary.kernel_basis().into_iter().map(|k| integer_vector(&k)).collect();
        Self {
            omega: omega.clone(),
            gluing,
            edges,
            valence,
            class_component,
            components,
            cycles: CycleBasis { cycles, pivots: free },
        }
    }

    pub fn omega(&self) -> &Omega {
        &self.omega
    }

    pub fn gluing(&self) -> &Gluing {
        &self.gluing
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn class_count(&self) -> usize {
        self.valence.len()
    }

    pub fn valence(&self) -> &[usize] {
        &self.valence
    }

    /// Classes of valence other than 2, named by their smallest member.
    pub fn vertices(&self) -> Vec<Rational> {
        self.gluing.classes().iter().zip(&self.valence).filter(|(_, &v)| v != 2).map(|(c, _)| c[0].clone()).collect()
    }

    pub fn component_count(&self) -> usize {
        self.components
    }

    /// Component of the edge (interval) `i`.
    pub fn edge_component(&self, i: usize) -> usize {
        self.class_component[self.edges[i].0]
    }

    pub fn h1_rank(&self) -> usize {
        self.cycles.len()
    }

    pub fn cycle_basis(&self) -> &CycleBasis {
        &self.cycles
    }

    /// Name of the graph point `π(x)`.
    pub fn canonical(&self, x: &Rational) -> Rational {
        match self.gluing.class_index(x) {
            Some(k) => self.gluing.classes()[k][0].clone(),
            None => x.clone(),
        }
    }

    /// Whether the graph point named `q` is a vertex of `G`.
    pub fn is_vertex(&self, q: &Rational) -> bool {
        self.gluing.class_index(q).is_some_and(|k| self.valence[k] != 2)
    }

    /// The germs of `G` at `π(x)`: both sides at an interior point, and the
    /// inward half-edges at a glued class.
    pub fn germs(&self, x: &Rational) -> Vec<(Rational, Side)> {
        match self.gluing.class_index(x) {
            None => vec![(x.clone(), Side::Minus), (x.clone(), Side::Plus)],
            Some(k) => self.gluing.classes()[k]
                .iter()
                .map(|p| {
                    let side = if self.omega.is_left_end(p) { Side::Plus } else { Side::Minus };
                    (p.clone(), side)
                })
                .collect(),
        }
    }
}

fn integer_vector(v: &[Rational]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Rational::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        ints
    } else {
        ints.into_iter().map(|x| x / &g).collect()
    }
}

/// A PM map together with a gluing under which it induces a continuous graph
/// map `f = π ∘ F ∘ π⁻¹`.
#[derive(Debug, Clone)]
pub struct InducedMap {
    map: PMMap,
    graph: GluedGraph,
    component_map: Vec<usize>,
    h1: QMatrix,
}

/// Checks that `F` induces a continuous map on the glued graph.
pub fn validate_induced(map: &PMMap, gluing: &Gluing) -> Result<InducedMap, GraphError> {
    let omega = map.domain();
    if Gluing::new(omega, gluing.classes())? != *gluing {
        return Err(GraphError::DomainMismatch);
    }
    let graph = GluedGraph::from_gluing(omega, gluing.clone());
    for c in map.critical() {
        if omega.is_boundary(c) {
            continue;
        }
        let images: Vec<Rational> = [Side::Minus, Side::Plus]
            .iter()
            .map(|&s| graph.canonical(&map.one_sided(c, s).expect("interior critical point has two branches").0))
            .collect();
        if images[0] != images[1] {
            return Err(GraphError::InconsistentGluing { point: c.clone(), images });
        }
    }
    for class in gluing.classes() {
        let images: Vec<Rational> = graph
            .germs(&class[0])
            .iter()
            .map(|(p, s)| graph.canonical(&map.one_sided(p, *s).expect("inward side has a branch").0))
            .collect();
        if images.iter().any(|y| *y != images[0]) {
            return Err(GraphError::InconsistentGluing { point: class[0].clone(), images });
        }
    }
    let mut induced = InducedMap { map: map.clone(), graph, component_map: Vec::new(), h1: QMatrix::zeros(0, 0) };
    induced.component_map = (0..omega.len())
        .map(|i| {
            let a = &omega.intervals()[i].0;
            let y = induced.point_image(a);
            let j = omega.component_of(&y).expect("image lies in Ω");
            (induced.graph.edge_component(i), induced.graph.edge_component(j))
        })
        .fold(vec![usize::MAX; induced.graph.component_count()], |mut acc, (from, to)| {
            acc[from] = to;
            acc
        });
    induced.h1 = induced.compute_h1()?;
    Ok(induced)
}

impl InducedMap {
    pub fn map(&self) -> &PMMap {
        &self.map
    }

    pub fn graph(&self) -> &GluedGraph {
        &self.graph
    }

    /// `f(π(x))`, named canonically.
    pub fn point_image(&self, x: &Rational) -> Rational {
        let (p, side) = if self.graph.gluing.class_index(x).is_some() {
            self.graph.germs(x)[0].clone()
        } else {
            (x.clone(), Side::Plus)
        };
        // at interior critical points both sides agree after gluing
        let y = self.map.one_sided(&p, side).expect("point has an adjacent branch").0;
        self.graph.canonical(&y)
    }

    /// One step of the germ dynamics: the germ of `G` on side `s` of `x` goes
    /// to the germ on side `s·ε` of `F(x s)`.
    pub fn germ_image(&self, x: &Rational, side: Side) -> (Rational, Side) {
        let (y, eps) = self.map.one_sided(x, side).expect("germ points into a branch");
        (y, side.times(eps))
    }

    /// Whether `f^n` fixes `π(q)` and reverses orientation there: `π(q)` is
    /// not a vertex, and `f^n` swaps its two germs.
    pub fn is_negative_fixed(&self, q: &Rational, n: usize) -> bool {
        if self.graph.is_vertex(q) {
            return false;
        }
        let germs = self.graph.germs(q);
        let image = |g: &(Rational, Side)| (0..n).fold(g.clone(), |(x, s), _| self.germ_image(&x, s));
        germs.len() == 2 && image(&germs[0]) == germs[1] && image(&germs[1]) == germs[0]
    }

    /// Component map: `component_map()[i]` is the component containing the image of component `i`.
    pub fn component_map(&self) -> &[usize] {
        &self.component_map
    }

    /// `f_{*0}` on `H₀(G)`: entry `(j, i)` is 1 iff component `i` maps into `j`.
    pub fn h0_matrix(&self) -> QMatrix {
        let c = self.graph.component_count();
        let mut m = QMatrix::zeros(c, c);
        for (i, &j) in self.component_map.iter().enumerate() {
            m.set(j, i, Rational::one());
        }
        m
    }

    /// `f_{*1}` on `H₁(G)` in the cycle basis of the graph.
    pub fn h1_matrix(&self) -> &QMatrix {
        &self.h1
    }

    /// `Σ_{c∈]a,b]} F(c−) − Σ_{c∈[a,b[} F(c+)` over the critical points of `[a, b]`.
    pub fn edge_image(&self, i: usize) -> FormalVector {
        let (a, b) = &self.graph.omega.intervals()[i];
        let mut out = FormalVector::zero();
        for c in self.map.critical().iter().filter(|c| *c >= a && *c <= b) {
            if c > a {
                out.add_term(self.map.one_sided(c, Side::Minus).expect("left branch").0, Rational::one());
            }
            if c < b {
                out.add_term(self.map.one_sided(c, Side::Plus).expect("right branch").0, -Rational::one());
            }
        }
        out
    }

    fn compute_h1(&self) -> Result<QMatrix, GraphError> {
        let basis = self.graph.cycle_basis();
        let k = basis.len();
        let omega = &self.graph.omega;
        let images: Vec<FormalVector> = (0..omega.len()).map(|i| self.edge_image(i)).collect();
        let mut m = QMatrix::zeros(k, k);
        for (col, cycle) in basis.cycles.iter().enumerate() {
            let mut chain = FormalVector::zero();
            for (img, lam) in images.iter().zip(cycle) {
                if !lam.is_zero() {
                    chain.add_scaled(img, &Rational::from_integer(lam.clone()));
                }
            }
            if let Some((p, c)) = chain.iter().find(|(p, _)| !omega.is_boundary(p)) {
                return Err(GraphError::InteriorResidue { cycle: col, point: p.clone(), coeff: c.clone() });
            }
            let mu: Vec<Rational> = omega.intervals().iter().map(|(_, b)| chain.coeff(b)).collect();
            if omega.intervals().iter().zip(&mu).any(|((a, _), m)| chain.coeff(a) != -m.clone()) {
                return Err(GraphError::NotInCycleSpace { cycle: col });
            }
            let coords = basis.coordinates(&mu).ok_or(GraphError::NotInCycleSpace { cycle: col })?;
            for (row, x) in coords.into_iter().enumerate() {
                m.set(row, col, x);
            }
        }
        Ok(m)
    }

    /// `h_hom(f) = log max{1, r(f_{*1})}`.
    pub fn h_hom(&self) -> f64 {
        spectral_radius(&self.h1).max(1.0).ln()
    }
}

/// Largest modulus of an eigenvalue, from the exact characteristic polynomial.
pub fn spectral_radius(a: &QMatrix) -> f64 {
    if a.rows() == 0 {
        return 0.0;
    }
    roots::max_root_modulus(&a.charpoly())
}

/// Largest eigenvalue modulus together with the residual of that root.
pub fn spectral_radius_with_residual(a: &QMatrix) -> (f64, f64) {
    if a.rows() == 0 {
        return (0.0, 0.0);
    }
    roots::polynomial_roots(&a.charpoly())
        .into_iter()
        .max_by(|x, y| x.modulus().total_cmp(&y.modulus()))
        .map_or((0.0, 0.0), |r| (r.modulus(), r.residual))
}

/// Checks the flow condition of a cycle vector at every class.
pub fn is_cycle(graph: &GluedGraph, lambda: &[BigInt]) -> bool {
    let mut flow = vec![BigInt::zero(); graph.class_count()];
    for (&(s, t), l) in graph.edges().iter().zip(lambda) {
        flow[t] += l;
        flow[s] -= l;
    }
    flow.iter().all(|x| x.abs().is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pm_domain::{BranchSpec, MapSpec};
    use crate::rational::{int, ratio};

    fn map(intervals: &[(i64, i64)], critical: &[Rational], branches: &[(i64, i64)]) -> PMMap {
        PMMap::validate(MapSpec {
            intervals: intervals.iter().map(|&(a, b)| (int(a), int(b))).collect(),
            critical: critical.to_vec(),
            branches: branches.iter().map(|&(s, t)| BranchSpec::new(int(s), int(t))).collect(),
        })
        .unwrap()
    }

    fn half_points() -> Vec<Rational> {
        vec![int(0), ratio(1, 2), int(1)]
    }

    fn unit() -> Omega {
        Omega::new(vec![(int(0), int(1))]).unwrap()
    }

    #[test]
    fn circle_wedge_and_interval() {
        let circle = build_graph(&unit(), &[vec![int(0), int(1)]]).unwrap();
        assert_eq!((circle.class_count(), circle.h1_rank()), (1, 1));
        assert!(circle.vertices().is_empty());

        let two = Omega::new(vec![(int(0), int(1)), (int(2), int(3))]).unwrap();
        let wedge = build_graph(&two, &[vec![int(0), int(1), int(2), int(3)]]).unwrap();
        assert_eq!(wedge.h1_rank(), 2);
        assert_eq!(wedge.vertices(), vec![int(0)]);
        for c in &wedge.cycle_basis().cycles {
            assert!(is_cycle(&wedge, c));
        }

        let interval = build_graph(&unit(), &[]).unwrap();
        assert_eq!(interval.h1_rank(), 0);
        assert_eq!(interval.vertices().len(), 2);
        assert!(matches!(build_graph(&unit(), &[vec![ratio(1, 2)]]), Err(GraphError::UnknownBoundaryPoint(_))));
    }

    #[test]
    fn doubling_on_the_circle() {
        let f = map(&[(0, 1)], &half_points(), &[(2, 0), (2, -1)]);
        let g = Gluing::new(f.domain(), &[vec![int(0), int(1)]]).unwrap();
        let induced = validate_induced(&f, &g).unwrap();
        assert_eq!(*induced.h1_matrix(), QMatrix::from_ints(&[&[2]]));
        assert_eq!(induced.h0_matrix(), QMatrix::from_ints(&[&[1]]));
        assert!((induced.h_hom() - 2f64.ln()).abs() < 1e-12);
        assert_eq!(induced.point_image(&int(1)), int(0));
        assert_eq!(induced.point_image(&ratio(1, 2)), int(0));
    }

    #[test]
    fn flip_reverses_the_circle() {
        let f = map(&[(0, 1)], &[int(0), int(1)], &[(-1, 1)]);
        let g = Gluing::new(f.domain(), &[vec![int(0), int(1)]]).unwrap();
        let induced = validate_induced(&f, &g).unwrap();
        assert_eq!(*induced.h1_matrix(), QMatrix::from_ints(&[&[-1]]));
        assert!(induced.is_negative_fixed(&int(0), 1));
        assert!(!induced.is_negative_fixed(&int(0), 2));
    }

    #[test]
    fn doubling_needs_the_gluing() {
        let f = map(&[(0, 1)], &half_points(), &[(2, 0), (2, -1)]);
        let err = validate_induced(&f, &Gluing::discrete(f.domain())).unwrap_err();
        assert!(matches!(err, GraphError::InconsistentGluing { point, .. } if point == ratio(1, 2)));
    }

    #[test]
    fn tent_is_an_interval_map() {
        let f = map(&[(0, 1)], &half_points(), &[(2, 0), (-2, 2)]);
        let induced = validate_induced(&f, &Gluing::discrete(f.domain())).unwrap();
        assert_eq!(induced.h1_matrix().rows(), 0);
        assert_eq!(induced.h_hom(), 0.0);
    }

    #[test]
    fn spectral_radii() {
        assert!((spectral_radius(&QMatrix::from_ints(&[&[2]])) - 2.0).abs() < 1e-12);
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((spectral_radius(&QMatrix::from_ints(&[&[0, 1], &[1, 1]])) - golden).abs() < 1e-9);
        assert_eq!(spectral_radius(&QMatrix::zeros(0, 0)), 0.0);
    }
}
