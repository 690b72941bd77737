//! Greedy hill climbing on subspace fitness.
//!
//! [`adjust_community`] toggles single nodes with the subspace fixed,
//! [`adjust_subspace`] toggles single dimensions with the community fixed,
//! and [`converge_pair`] alternates the two until neither changes anything.
//! Every applied move strictly increases fitness, which is bounded by 1.
//!
//! The functions taking a [`WeightedView`] work on fully materialized
//! weights. [`SearchContext`] runs the same search with weights computed
//! only for edges near the community, and shares the per-subspace kernel
//! scale between seeds, which is what [`crate::pipeline::mine`] uses.

use std::cell::{Cell, RefCell};
use std::collections::{BTreeSet, HashMap};
use std::sync::Mutex;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AttributedGraph, EdgeId, NodeId};
use crate::kernel::{
    candidate_fitness, edge_norm, fitness_ratio, kernel_weight, norm_update, Candidate, CommunityState, EdgeWeights,
    KernelConfig, SquareSums, Subspace, Toggle, WeightedView,
};

/// Smallest fitness gain counted as an improvement. Gains below this are
/// rounding noise and would let the search cycle on plateaus.
pub const MIN_GAIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Cap on community/subspace alternations per pair.
    pub max_alternations: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { max_alternations: 50 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjustOutcome {
    pub community: Vec<NodeId>,
    pub subspace: Subspace,
    pub fitness: f64,
    /// Alternations run, including the final one that changed nothing.
    pub iterations: usize,
    /// Set when the alternation cap stopped the search.
    pub capped: bool,
    /// Fitness after every applied move, in order.
    pub trace: Vec<f64>,
}

/// A view the dimension search can probe and move.
trait SubspaceMoves: EdgeWeights {
    type Pending;

    fn current(&self) -> &Subspace;

    /// Fitness of `community` after toggling `dim`, plus whatever is needed
    /// to commit that move.
    fn probe(
        &self,
        graph: &AttributedGraph,
        dim: usize,
        toggle: Toggle,
        community: &CommunityState,
    ) -> Result<(f64, Self::Pending)>;

    fn commit(&mut self, graph: &AttributedGraph, pending: Self::Pending);
}

impl SubspaceMoves for WeightedView {
    type Pending = Candidate;

    fn current(&self) -> &Subspace {
        self.subspace()
    }

    fn probe(
        &self,
        graph: &AttributedGraph,
        dim: usize,
        toggle: Toggle,
        community: &CommunityState,
    ) -> Result<(f64, Candidate)> {
        let candidate = self.candidate(graph, dim, toggle)?;
        Ok((candidate_fitness(graph, &candidate, community), candidate))
    }

    fn commit(&mut self, graph: &AttributedGraph, pending: Candidate) {
        *self = WeightedView::from_candidate(graph, pending, self.theta());
    }
}

/// Shared state for searching many seeds on one graph: the kernel
/// configuration and a cache of the kernel scale of every subspace seen.
///
/// The scale of a subspace depends on all edge norms, so it is the one
/// quantity that costs `O(m)`; everything else a search step needs is
/// local to the community.
pub struct SearchContext<'g> {
    graph: &'g AttributedGraph,
    kernel: KernelConfig,
    scales: Mutex<HashMap<Subspace, f64>>,
    pool: Mutex<Vec<Caches>>,
}

impl<'g> SearchContext<'g> {
    pub fn new(graph: &'g AttributedGraph, kernel: KernelConfig) -> Result<Self> {
        kernel.validate()?;
        Ok(SearchContext {
            graph,
            kernel,
            scales: Mutex::new(HashMap::new()),
            pool: Mutex::new(Vec::new()),
        })
    }

    /// `theta` times the standard deviation of all edge norms, computed the
    /// same way as [`crate::kernel::reweigh`].
    pub fn effective_scale(&self, subspace: &Subspace) -> f64 {
        if let Some(scale) = self.cached_scale(subspace) {
            return scale;
        }
        let variance = SquareSums::compute(self.graph, subspace).variance(self.graph, subspace.len());
        self.remember(subspace, variance)
    }

    /// Scale of `base` with `dim` toggled, from the square sums of `base`.
    /// Same value as [`Self::effective_scale`] of the toggled subspace.
    fn toggled_scale(&self, base: &SquareSums, target: &Subspace, dim: usize, toggle: Toggle) -> f64 {
        let variance = base.toggled_variance(self.graph, target.len(), dim, toggle);
        self.remember(target, variance)
    }

    fn cached_scale(&self, subspace: &Subspace) -> Option<f64> {
        self.scales.lock().expect("scale cache lock").get(subspace).copied()
    }

    fn remember(&self, subspace: &Subspace, variance: f64) -> f64 {
        let scale = self.kernel.theta * variance.sqrt();
        self.scales
            .lock()
            .expect("scale cache lock")
            .insert(subspace.clone(), scale);
        scale
    }

    /// Number of subspaces whose scale has been computed.
    pub fn cached_subspaces(&self) -> usize {
        self.scales.lock().expect("scale cache lock").len()
    }

    /// [`converge_pair`] with lazily computed weights.
    pub fn converge(&self, seed: &[NodeId], initial: &Subspace, config: &SearchConfig) -> Result<AdjustOutcome> {
        if initial
            .dims()
            .last()
            .is_some_and(|&d| d >= self.graph.attribute_count())
        {
            return Err(Error::Subspace(format!(
                "{initial} does not fit a schema of {} attributes",
                self.graph.attribute_count()
            )));
        }
        let view = LocalView::new(self, initial.clone());
        converge_with(self.graph, seed, view, config)
    }
}

/// Per-edge and per-node caches of a [`LocalView`], reused across seeds.
/// Entries are tagged with a generation, so moving to a new subspace or a
/// new seed invalidates them all at once.
struct Caches {
    generation: u32,
    edge_stamp: Vec<Cell<u32>>,
    norms: Vec<Cell<f64>>,
    weights: Vec<Cell<f64>>,
    degree_stamp: Vec<Cell<u32>>,
    degrees: Vec<Cell<f64>>,
    // square sums of the current subspace, filled on the first uncached probe
    sums: RefCell<SquareSums>,
    sums_generation: Cell<u32>,
}

impl Caches {
    fn new(m: usize, n: usize) -> Self {
        Caches {
            generation: 0,
            edge_stamp: (0..m).map(|_| Cell::new(0)).collect(),
            norms: (0..m).map(|_| Cell::new(0.0)).collect(),
            weights: (0..m).map(|_| Cell::new(0.0)).collect(),
            degree_stamp: (0..n).map(|_| Cell::new(0)).collect(),
            degrees: (0..n).map(|_| Cell::new(0.0)).collect(),
            sums: RefCell::new(SquareSums::default()),
            sums_generation: Cell::new(0),
        }
    }

    fn invalidate(&mut self) {
        if self.generation == u32::MAX {
            self.edge_stamp.iter().chain(&self.degree_stamp).for_each(|c| c.set(0));
            self.sums_generation.set(0);
            self.generation = 0;
        }
        self.generation += 1;
    }
}

/// Weights of one subspace, computed per edge on first use.
struct LocalView<'c, 'g> {
    context: &'c SearchContext<'g>,
    subspace: Subspace,
    scale: f64,
    caches: Option<Caches>,
}

impl<'c, 'g> LocalView<'c, 'g> {
    fn new(context: &'c SearchContext<'g>, subspace: Subspace) -> Self {
        let mut caches = context
            .pool
            .lock()
            .expect("cache pool lock")
            .pop()
            .unwrap_or_else(|| Caches::new(context.graph.edge_count(), context.graph.node_count()));
        caches.invalidate();
        LocalView {
            context,
            scale: context.effective_scale(&subspace),
            subspace,
            caches: Some(caches),
        }
    }

    fn caches(&self) -> &Caches {
        self.caches.as_ref().expect("caches are held until drop")
    }

    fn fill(&self, e: EdgeId) {
        let c = self.caches();
        if c.edge_stamp[e].get() != c.generation {
            let norm = edge_norm(self.context.graph, e, &self.subspace);
            c.norms[e].set(norm);
            c.weights[e].set(kernel_weight(norm, self.scale));
            c.edge_stamp[e].set(c.generation);
        }
    }

    fn norm(&self, e: EdgeId) -> f64 {
        self.fill(e);
        self.caches().norms[e].get()
    }
}

impl Drop for LocalView<'_, '_> {
    fn drop(&mut self) {
        if let (Some(caches), Ok(mut pool)) = (self.caches.take(), self.context.pool.lock()) {
            pool.push(caches);
        }
    }
}

impl EdgeWeights for LocalView<'_, '_> {
    fn weight(&self, e: EdgeId) -> f64 {
        self.fill(e);
        self.caches().weights[e].get()
    }

    fn weighted_degree(&self, v: NodeId) -> f64 {
        let c = self.caches();
        if c.degree_stamp[v].get() != c.generation {
            let degree = self
                .context
                .graph
                .neighbors(v)
                .iter()
                .map(|&(_, e)| self.weight(e))
                .sum();
            c.degrees[v].set(degree);
            c.degree_stamp[v].set(c.generation);
        }
        c.degrees[v].get()
    }
}

impl SubspaceMoves for LocalView<'_, '_> {
    type Pending = (Subspace, f64);

    fn current(&self) -> &Subspace {
        &self.subspace
    }

    /// Norms of the community's edges follow from the current ones by the
    /// incremental update; only the candidate's scale needs the whole graph,
    /// and it comes from the shared cache.
    fn probe(
        &self,
        graph: &AttributedGraph,
        dim: usize,
        toggle: Toggle,
        community: &CommunityState,
    ) -> Result<(f64, (Subspace, f64))> {
        let subspace = toggled(&self.subspace, dim, toggle, graph.attribute_count())?;
        let scale = match self.context.cached_scale(&subspace) {
            Some(scale) => scale,
            None => {
                let c = self.caches();
                if c.sums_generation.get() != c.generation {
                    c.sums.borrow_mut().refill(graph, &self.subspace);
                    c.sums_generation.set(c.generation);
                }
                self.context.toggled_scale(&c.sums.borrow(), &subspace, dim, toggle)
            }
        };
        let size = self.subspace.len();
        let (mut invol, mut vol) = (0.0, 0.0);
        for &u in community.members() {
            for &(v, e) in graph.neighbors(u) {
                let norm = norm_update(self.norm(e), size, graph.edge_difference(e, dim), toggle)?;
                let w = kernel_weight(norm, scale);
                vol += w;
                if community.contains(v) {
                    invol += w;
                }
            }
        }
        Ok((fitness_ratio(invol, vol), (subspace, scale)))
    }

    fn commit(&mut self, _graph: &AttributedGraph, (subspace, scale): (Subspace, f64)) {
        self.subspace = subspace;
        self.scale = scale;
        self.caches.as_mut().expect("caches are held until drop").invalidate();
    }
}

fn toggled(subspace: &Subspace, dim: usize, toggle: Toggle, attribute_count: usize) -> Result<Subspace> {
    match toggle {
        Toggle::Add if dim >= attribute_count => Err(Error::Precondition(format!("dimension {dim} out of range"))),
        Toggle::Add if subspace.contains(dim) => {
            Err(Error::Precondition(format!("dimension {dim} already in {subspace}")))
        }
        Toggle::Add => Ok(subspace.with(dim)),
        Toggle::Remove if !subspace.contains(dim) => {
            Err(Error::Precondition(format!("dimension {dim} not in {subspace}")))
        }
        Toggle::Remove => subspace
            .without(dim)
            .ok_or_else(|| Error::Precondition(format!("cannot remove the only dimension of {subspace}"))),
    }
}

/// Per-node weight to the community and link counts, kept in step with the
/// community so each candidate move is scored in constant time.
struct Frontier {
    internal: HashMap<NodeId, f64>,
    links: HashMap<NodeId, u32>,
    outside: BTreeSet<NodeId>,
}

impl Frontier {
    fn new<W: EdgeWeights>(graph: &AttributedGraph, view: &W, community: &CommunityState) -> Self {
        let mut frontier = Frontier {
            internal: HashMap::new(),
            links: HashMap::new(),
            outside: BTreeSet::new(),
        };
        for &u in community.members() {
            for &(v, e) in graph.neighbors(u) {
                *frontier.internal.entry(v).or_default() += view.weight(e);
                *frontier.links.entry(v).or_default() += 1;
                if !community.contains(v) {
                    frontier.outside.insert(v);
                }
            }
        }
        frontier
    }

    fn internal(&self, v: NodeId) -> f64 {
        self.internal.get(&v).copied().unwrap_or(0.0)
    }

    /// Bookkeeping after `v` joined (`Add`) or left (`Remove`) the community.
    fn shift<W: EdgeWeights>(
        &mut self,
        graph: &AttributedGraph,
        view: &W,
        community: &CommunityState,
        v: NodeId,
        toggle: Toggle,
    ) {
        for &(x, e) in graph.neighbors(v) {
            match toggle {
                Toggle::Add => {
                    *self.internal.entry(x).or_default() += view.weight(e);
                    *self.links.entry(x).or_default() += 1;
                    if !community.contains(x) {
                        self.outside.insert(x);
                    }
                }
                Toggle::Remove => {
                    let links = self.links.get_mut(&x).expect("neighbor of a member is linked");
                    *links -= 1;
                    if *links == 0 {
                        self.links.remove(&x);
                        self.internal.remove(&x);
                        self.outside.remove(&x);
                    } else {
                        *self.internal.get_mut(&x).expect("linked node has a weight") -= view.weight(e);
                    }
                }
            }
        }
        match toggle {
            Toggle::Add => {
                self.outside.remove(&v);
            }
            Toggle::Remove => {
                if self.links.contains_key(&v) {
                    self.outside.insert(v);
                }
            }
        }
    }
}

fn best_node_move<W: EdgeWeights>(
    view: &W,
    community: &CommunityState,
    frontier: &Frontier,
) -> Option<(NodeId, Toggle)> {
    let current = community.fitness();
    let mut best = None;
    let mut best_gain = MIN_GAIN;
    let mut consider = |v: NodeId, toggle: Toggle| {
        let (invol, vol) = community.toggled_sums(frontier.internal(v), view.weighted_degree(v), toggle);
        let gain = fitness_ratio(invol, vol) - current;
        if gain > best_gain {
            best_gain = gain;
            best = Some((v, toggle));
        }
    };
    if community.len() >= 2 {
        for &u in community.members() {
            consider(u, Toggle::Remove);
        }
    }
    for &v in &frontier.outside {
        consider(v, Toggle::Add);
    }
    best
}

fn adjust_community_traced<W: EdgeWeights>(
    graph: &AttributedGraph,
    view: &W,
    community: &mut CommunityState,
    trace: &mut Vec<f64>,
) {
    let mut frontier = Frontier::new(graph, view, community);
    while let Some((v, toggle)) = best_node_move(view, community, &frontier) {
        let internal = frontier.internal(v);
        community.apply_with(v, internal, view.weighted_degree(v), toggle);
        frontier.shift(graph, view, community, v, toggle);
        trace.push(community.fitness());
    }
    community.recompute(graph, view);
}

/// Applies the best single node addition or removal until none improves
/// fitness. Ties go to removals, then to the smallest node id.
pub fn adjust_community(graph: &AttributedGraph, view: &WeightedView, mut community: CommunityState) -> CommunityState {
    adjust_community_traced(graph, view, &mut community, &mut Vec::new());
    community
}

fn best_dimension_move<V: SubspaceMoves>(
    graph: &AttributedGraph,
    view: &V,
    community: &CommunityState,
) -> Result<Option<V::Pending>> {
    let current = community.fitness();
    let subspace = view.current();
    let mut best = None;
    let mut best_gain = MIN_GAIN;
    let removals = subspace
        .dims()
        .iter()
        .filter(|_| subspace.len() >= 2)
        .map(|&i| (i, Toggle::Remove));
    let additions = (0..graph.attribute_count())
        .filter(|&i| !subspace.contains(i))
        .map(|i| (i, Toggle::Add));
    for (dim, toggle) in removals.chain(additions) {
        let (fitness, pending) = view.probe(graph, dim, toggle, community)?;
        let gain = fitness - current;
        if gain > best_gain {
            best_gain = gain;
            best = Some(pending);
        }
    }
    Ok(best)
}

fn adjust_subspace_traced<V: SubspaceMoves>(
    graph: &AttributedGraph,
    view: &mut V,
    community: &mut CommunityState,
    trace: &mut Vec<f64>,
) -> Result<()> {
    community.recompute(graph, view);
    while let Some(pending) = best_dimension_move(graph, view, community)? {
        view.commit(graph, pending);
        community.recompute(graph, view);
        trace.push(community.fitness());
    }
    Ok(())
}

/// Applies the best single dimension addition or removal until none
/// improves fitness. Ties go to removals, then to the smallest index.
/// Returns the final subspace's view; `community` is rebound to it.
pub fn adjust_subspace(
    graph: &AttributedGraph,
    mut view: WeightedView,
    community: &mut CommunityState,
) -> Result<WeightedView> {
    adjust_subspace_traced(graph, &mut view, community, &mut Vec::new())?;
    Ok(view)
}

/// Alternates both procedures from `seed` until a full round changes
/// neither the community nor the subspace.
pub fn converge_pair(
    graph: &AttributedGraph,
    seed: &[NodeId],
    initial_subspace: &Subspace,
    kernel: KernelConfig,
    config: &SearchConfig,
) -> Result<AdjustOutcome> {
    SearchContext::new(graph, kernel)?.converge(seed, initial_subspace, config)
}

/// [`converge_pair`] on materialized views, starting from `view`. Slower;
/// kept as the reference the lazy search is checked against.
pub fn converge_from_view(
    graph: &AttributedGraph,
    seed: &[NodeId],
    view: WeightedView,
    config: &SearchConfig,
) -> Result<AdjustOutcome> {
    converge_with(graph, seed, view, config)
}

fn converge_with<V: SubspaceMoves>(
    graph: &AttributedGraph,
    seed: &[NodeId],
    mut view: V,
    config: &SearchConfig,
) -> Result<AdjustOutcome> {
    if seed.is_empty() {
        return Err(Error::Precondition("seed must be non-empty".into()));
    }
    let mut community = CommunityState::new(graph, &view, seed.iter().copied())?;
    let mut trace = vec![community.fitness()];
    let mut iterations = 0;
    let mut capped = true;
    while iterations < config.max_alternations {
        iterations += 1;
        let members_before = community.members().clone();
        let subspace_before = view.current().clone();
        adjust_community_traced(graph, &view, &mut community, &mut trace);
        adjust_subspace_traced(graph, &mut view, &mut community, &mut trace)?;
        if *community.members() == members_before && *view.current() == subspace_before {
            capped = false;
            break;
        }
    }
    if capped {
        warn!(
            "pair seeded at node {} hit the alternation cap of {}",
            seed[0], config.max_alternations
        );
    }
    Ok(AdjustOutcome {
        community: community.members().iter().copied().collect(),
        subspace: view.current().clone(),
        fitness: community.fitness(),
        iterations,
        capped,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{AttributeKind, AttributeSchema};
    use crate::kernel::{fitness_delta_node, reweigh, subspace_fitness};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn clique(nodes: &[usize]) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for (i, &u) in nodes.iter().enumerate() {
            for &v in &nodes[i + 1..] {
                edges.push((u, v));
            }
        }
        edges
    }

    fn numeric(values: Vec<f64>, r: usize, edges: Vec<(usize, usize)>) -> AttributedGraph {
        let schema = AttributeSchema::uniform(AttributeKind::Numerical, r, 0).unwrap();
        AttributedGraph::from_parts(schema, values, edges).unwrap().0
    }

    fn unit_view(g: &AttributedGraph) -> WeightedView {
        reweigh(
            g,
            &Subspace::new([0], g.attribute_count()).unwrap(),
            KernelConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn isolated_clique_is_left_alone() {
        let mut edges = clique(&[0, 1, 2, 3]);
        edges.extend(clique(&[4, 5, 6]));
        let g = numeric(vec![0.5; 7], 1, edges);
        let view = unit_view(&g);
        let c = CommunityState::new(&g, &view, 0..4).unwrap();
        let out = adjust_community(&g, &view, c.clone());
        assert_eq!(out.members(), c.members());
        assert_eq!(out.fitness(), 1.0);
    }

    #[test]
    fn missing_clique_member_is_added() {
        let g = numeric(vec![0.5; 5], 1, clique(&[0, 1, 2, 3, 4]));
        let view = unit_view(&g);
        let c = CommunityState::new(&g, &view, 0..4).unwrap();
        // brute-force check that the addition is an improvement
        assert!(fitness_delta_node(&g, &view, &c, 4, Toggle::Add).unwrap() > 0.0);
        let out = adjust_community(&g, &view, c);
        assert_eq!(out.members().len(), 5);
        assert_eq!(out.fitness(), 1.0);
    }

    #[test]
    fn degree_one_outlier_is_removed() {
        let mut edges = clique(&[0, 1, 2, 3, 4]);
        edges.push((4, 5));
        edges.extend(clique(&[5, 6, 7, 8]));
        let g = numeric(vec![0.5; 9], 1, edges);
        let view = unit_view(&g);
        let c = CommunityState::new(&g, &view, 0..6).unwrap();
        let delta = fitness_delta_node(&g, &view, &c, 5, Toggle::Remove).unwrap();
        assert!(delta > 0.0);
        let out = adjust_community(&g, &view, c);
        assert_eq!(out.members().iter().copied().collect::<Vec<_>>(), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn full_subspace_without_improving_removal_is_kept() {
        // two dimensions, both separate the clique from the rest equally
        let mut edges = clique(&[0, 1, 2, 3]);
        edges.extend(clique(&[4, 5, 6, 7]));
        edges.push((3, 4));
        let mut values = Vec::new();
        for v in 0..8 {
            let x = if v < 4 { 0.0 } else { 1.0 };
            values.extend([x, x]);
        }
        let g = numeric(values, 2, edges);
        let full = Subspace::new([0, 1], 2).unwrap();
        let view = reweigh(&g, &full, KernelConfig::default()).unwrap();
        let mut c = CommunityState::new(&g, &view, 0..4).unwrap();
        let out = adjust_subspace(&g, view, &mut c).unwrap();
        assert_eq!(out.subspace(), &full);
    }

    #[test]
    fn homogeneous_dimension_is_added() {
        // community {0..4} is identical on dim 1 and differs from its
        // neighbors there; dim 0 is noise
        let mut edges = clique(&[0, 1, 2, 3, 4]);
        edges.extend(clique(&[5, 6, 7, 8, 9]));
        edges.extend([(0, 5), (1, 6), (2, 7)]);
        let noise = [0.1, 0.9, 0.4, 0.7, 0.2, 0.8, 0.3, 0.6, 0.0, 1.0];
        let mut values = Vec::new();
        for (v, &x) in noise.iter().enumerate() {
            values.push(x);
            values.push(if v < 5 { 0.0 } else { 1.0 });
        }
        let g = numeric(values, 2, edges);
        let d0 = Subspace::new([0], 2).unwrap();
        let view = reweigh(&g, &d0, KernelConfig::default()).unwrap();
        let mut c = CommunityState::new(&g, &view, 0..5).unwrap();
        let before = c.fitness();
        // brute force over the single legal action
        let with = reweigh(&g, &d0.with(1), KernelConfig::default()).unwrap();
        let expected = CommunityState::new(&g, &with, 0..5).unwrap().fitness();
        assert!(expected > before);
        let out = adjust_subspace(&g, view, &mut c).unwrap();
        assert!(out.subspace().contains(1));
        assert!(c.fitness() >= expected - 1e-12);
        // the move is not undone on the next sweep
        let again = adjust_subspace(&g, out.clone(), &mut c).unwrap();
        assert_eq!(again.subspace(), out.subspace());
    }

    #[test]
    fn converge_trace_is_monotone_and_outcome_consistent() {
        let mut edges = clique(&[0, 1, 2, 3, 4, 5]);
        edges.extend(clique(&[6, 7, 8, 9, 10]));
        edges.extend([(0, 6), (2, 8), (5, 10), (4, 7)]);
        let mut values = Vec::new();
        for v in 0..11 {
            let side = if v < 6 { 0.1 } else { 0.9 };
            values.extend([side, (v as f64 * 0.37) % 1.0, side, (v as f64 * 0.61) % 1.0]);
        }
        let g = numeric(values, 4, edges);
        let out = converge_pair(
            &g,
            &[0, 1, 6],
            &Subspace::new([0], 4).unwrap(),
            KernelConfig::default(),
            &SearchConfig::default(),
        )
        .unwrap();
        assert!(!out.capped);
        for w in out.trace.windows(2) {
            assert!(w[1] >= w[0] - 1e-12, "{:?}", out.trace);
        }
        let fresh = reweigh(&g, &out.subspace, KernelConfig::default()).unwrap();
        let c = CommunityState::new(&g, &fresh, out.community.iter().copied()).unwrap();
        assert!((subspace_fitness(&c) - out.fitness).abs() < 1e-9);
    }

    #[test]
    fn cap_is_reported() {
        let g = numeric(vec![0.5; 5], 1, clique(&[0, 1, 2, 3, 4]));
        let out = converge_pair(
            &g,
            &[0, 1],
            &Subspace::new([0], 1).unwrap(),
            KernelConfig::default(),
            &SearchConfig { max_alternations: 1 },
        )
        .unwrap();
        assert!(out.capped);
        assert_eq!(out.iterations, 1);
        assert!(converge_pair(
            &g,
            &[],
            &Subspace::new([0], 1).unwrap(),
            KernelConfig::default(),
            &SearchConfig::default()
        )
        .is_err());
    }

    #[test]
    fn lazy_search_matches_materialized_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..60 {
            let n = rng.random_range(8..40);
            let r = rng.random_range(1..6);
            let values: Vec<f64> = (0..n * r).map(|_| rng.random::<f64>()).collect();
            let edges: Vec<(usize, usize)> = (0..n * 3)
                .map(|_| (rng.random_range(0..n), rng.random_range(0..n)))
                .collect();
            let g = numeric(values, r, edges);
            if g.edge_count() == 0 {
                continue;
            }
            let initial = Subspace::new([rng.random_range(0..r)], r).unwrap();
            let seed: Vec<usize> = (0..3).map(|_| rng.random_range(0..n)).collect();
            let config = SearchConfig::default();
            let view = reweigh(&g, &initial, KernelConfig::default()).unwrap();
            let reference = converge_from_view(&g, &seed, view, &config).unwrap();
            let lazy = converge_pair(&g, &seed, &initial, KernelConfig::default(), &config).unwrap();
            assert_eq!(lazy.community, reference.community);
            assert_eq!(lazy.subspace, reference.subspace);
            assert!((lazy.fitness - reference.fitness).abs() < 1e-9);
        }
    }

    #[test]
    fn context_scale_matches_reweigh() {
        let mut edges = clique(&[0, 1, 2, 3]);
        edges.push((3, 4));
        let values = vec![0.1, 0.5, 0.2, 0.4, 0.3, 0.3, 0.9, 0.0, 1.0, 0.7];
        let g = numeric(values, 2, edges);
        let context = SearchContext::new(&g, KernelConfig { theta: 2.0 }).unwrap();
        for dims in [vec![0], vec![1], vec![0, 1]] {
            let s = Subspace::new(dims, 2).unwrap();
            let view = reweigh(&g, &s, KernelConfig { theta: 2.0 }).unwrap();
            assert_eq!(context.effective_scale(&s), view.effective_scale());
        }
        assert_eq!(context.cached_subspaces(), 3);
    }
}
