//! Group formation: partition agents by the position/velocity similarity
//! relation and its transitive closure.

use std::collections::BTreeMap;

use crate::model::{Agent, AgentId, Group, GroupId};

/// Thresholds for the pairwise similarity relation.
#[derive(Clone, Copy, Debug)]
pub struct SimilarityParams {
    /// Position threshold (m), strict.
    pub eps_p: f64,
    /// Velocity threshold (m/s), strict.
    pub eps_v: f64,
}

/// The pairwise similarity relation: both the position and velocity
/// differences must be strictly below their thresholds.
pub fn similar(a: &Agent, b: &Agent, p: SimilarityParams) -> bool {
    a.position.dist(b.position) < p.eps_p && a.velocity.dist(b.velocity) < p.eps_v
}

/// A partition of agents into groups (size >= 2) and isolated agents.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Partition {
    /// Member-id lists, each sorted ascending; lists ordered by their lowest
    /// member id.
    pub groups: Vec<Vec<AgentId>>,
    pub isolated: Vec<AgentId>,
}

/// Partition `agents` into the connected components of the similarity
/// relation (its transitive closure). Components of size 1 become isolated
/// agents. Greedy: each agent is tested against the members of existing
/// clusters; an agent linking several clusters merges them.
///
/// Only the agents passed in participate; the caller filters out arrived
/// agents.
pub fn form_groups(agents: &[&Agent], p: SimilarityParams) -> Partition {
    // clusters hold indices into `agents`
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut order: Vec<usize> = (0..agents.len()).collect();
    order.sort_by_key(|&i| agents[i].id);

    for &i in &order {
        let agent = agents[i];
        let mut linked: Vec<usize> = Vec::new();
        for (ci, cluster) in clusters.iter().enumerate() {
            if cluster.iter().any(|&m| similar(agent, agents[m], p)) {
                linked.push(ci);
            }
        }
        match linked.split_first() {
            None => clusters.push(vec![i]),
            Some((&first, rest)) => {
                // merge all linked clusters into the first, then add the agent
                for &ci in rest.iter().rev() {
                    let moved = clusters.remove(ci);
                    clusters[first].extend(moved);
                }
                clusters[first].push(i);
            }
        }
    }

    let mut groups = Vec::new();
    let mut isolated = Vec::new();
    for cluster in clusters {
        let mut ids: Vec<AgentId> = cluster.iter().map(|&i| agents[i].id).collect();
        ids.sort_unstable();
        if ids.len() >= 2 {
            groups.push(ids);
        } else {
            isolated.push(ids[0]);
        }
    }
    groups.sort_by_key(|g| g[0]);
    isolated.sort_unstable();
    Partition { groups, isolated }
}

/// Whether a global re-clustering is due: a group leader's velocity solve
/// reported infeasibility this step, or some group has deformed beyond
/// 3 * eps_p in diameter.
pub fn needs_recluster(
    groups: &BTreeMap<GroupId, Group>,
    agents: &[Agent],
    leader_infeasible: bool,
    eps_p: f64,
) -> bool {
    if leader_infeasible {
        return true;
    }
    let limit = 3.0 * eps_p;
    for group in groups.values() {
        for (i, &a) in group.members.iter().enumerate() {
            for &b in &group.members[i + 1..] {
                if agents[a].position.dist(agents[b].position) > limit {
                    return true;
                }
            }
        }
    }
    false
}
