use std::collections::BTreeSet;

use super::{fitness_ratio, EdgeWeights, Toggle};
use crate::error::{Error, Result};
use crate::graph::{AttributedGraph, NodeId};

/// A community with its cached internal and total weight under one view.
///
/// `invol` counts every internal edge twice (once per endpoint), `vol` is
/// the sum of the members' weighted degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct CommunityState {
    members: BTreeSet<NodeId>,
    in_community: Vec<bool>,
    invol: f64,
    vol: f64,
}

impl CommunityState {
    pub fn new<W: EdgeWeights + ?Sized>(
        graph: &AttributedGraph,
        view: &W,
        members: impl IntoIterator<Item = NodeId>,
    ) -> Result<Self> {
        let members: BTreeSet<NodeId> = members.into_iter().collect();
        if members.is_empty() {
            return Err(Error::Precondition("community must be non-empty".into()));
        }
        if let Some(&bad) = members.iter().find(|&&v| v >= graph.node_count()) {
            return Err(Error::Precondition(format!("node {bad} out of range")));
        }
        let mut in_community = vec![false; graph.node_count()];
        for &v in &members {
            in_community[v] = true;
        }
        let mut state = CommunityState {
            members,
            in_community,
            invol: 0.0,
            vol: 0.0,
        };
        state.recompute(graph, view);
        Ok(state)
    }

    /// Recomputes `invol` and `vol` from scratch, e.g. after the view changed.
    pub fn recompute<W: EdgeWeights + ?Sized>(&mut self, graph: &AttributedGraph, view: &W) {
        let mut invol = 0.0;
        let mut vol = 0.0;
        for &u in &self.members {
            for &(v, e) in graph.neighbors(u) {
                let w = view.weight(e);
                vol += w;
                if self.in_community[v] {
                    invol += w;
                }
            }
        }
        self.invol = invol;
        self.vol = vol;
    }

    pub fn members(&self) -> &BTreeSet<NodeId> {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    /// Always false: a community keeps at least one member.
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.in_community[v]
    }

    pub fn invol(&self) -> f64 {
        self.invol
    }

    pub fn vol(&self) -> f64 {
        self.vol
    }

    pub fn fitness(&self) -> f64 {
        fitness_ratio(self.invol, self.vol)
    }

    /// Weight between `v` and the other members.
    pub fn internal_weight<W: EdgeWeights + ?Sized>(&self, graph: &AttributedGraph, view: &W, v: NodeId) -> f64 {
        graph
            .neighbors(v)
            .iter()
            .filter(|&&(u, _)| self.in_community[u])
            .map(|&(_, e)| view.weight(e))
            .sum()
    }

    pub fn has_neighbor_in(&self, graph: &AttributedGraph, v: NodeId) -> bool {
        graph.neighbors(v).iter().any(|&(u, _)| self.in_community[u])
    }

    pub(crate) fn check_toggle(&self, graph: &AttributedGraph, v: NodeId, toggle: Toggle) -> Result<()> {
        if v >= graph.node_count() {
            return Err(Error::Precondition(format!("node {v} out of range")));
        }
        match toggle {
            Toggle::Add if self.in_community[v] => Err(Error::Precondition(format!("node {v} already a member"))),
            Toggle::Add if !self.has_neighbor_in(graph, v) => Err(Error::Precondition(format!(
                "node {v} has no neighbor in the community"
            ))),
            Toggle::Remove if !self.in_community[v] => Err(Error::Precondition(format!("node {v} is not a member"))),
            Toggle::Remove if self.members.len() < 2 => {
                Err(Error::Precondition("cannot remove the last member".into()))
            }
            _ => Ok(()),
        }
    }

    /// `(invol, vol)` after toggling `v`, given its internal weight.
    pub(crate) fn toggled_sums(&self, internal: f64, degree: f64, toggle: Toggle) -> (f64, f64) {
        match toggle {
            Toggle::Add => (self.invol + 2.0 * internal, self.vol + degree),
            Toggle::Remove => (self.invol - 2.0 * internal, self.vol - degree),
        }
    }

    /// Adds or removes `v`, updating the cached sums incrementally.
    pub fn apply<W: EdgeWeights + ?Sized>(
        &mut self,
        graph: &AttributedGraph,
        view: &W,
        v: NodeId,
        toggle: Toggle,
    ) -> Result<()> {
        self.check_toggle(graph, v, toggle)?;
        let internal = self.internal_weight(graph, view, v);
        self.apply_with(v, internal, view.weighted_degree(v), toggle);
        Ok(())
    }

    pub(crate) fn apply_with(&mut self, v: NodeId, internal: f64, degree: f64, toggle: Toggle) {
        let (invol, vol) = self.toggled_sums(internal, degree, toggle);
        self.invol = invol.max(0.0);
        self.vol = vol.max(0.0);
        match toggle {
            Toggle::Add => {
                self.members.insert(v);
                self.in_community[v] = true;
            }
            Toggle::Remove => {
                self.members.remove(&v);
                self.in_community[v] = false;
            }
        }
    }
}
