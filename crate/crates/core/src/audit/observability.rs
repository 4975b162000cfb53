//! Local observability: operations that agree locally must agree on bipartite states.

use super::{AuditConfig, AuditResult, Postulate, Status, Witness};
use crate::models::rebit::{extended_action, extended_faithful, local_matrix};
use crate::models::ModelBundle;

pub fn audit_local_observability(m: &ModelBundle, cfg: &AuditConfig) -> AuditResult {
    let eps = cfg.tol.eps;
    if m.ghost_pairs.is_empty() {
        let mut r = AuditResult::new(Postulate::LocalObservability, Status::Holds)
            .note("no locally indistinguishable pair of operations");
        if m.ghosts_identified {
            r = r.note("locally indistinguishable operations identified; 9-dimensional identification");
        }
        return r;
    }
    let state = extended_faithful();
    let mut result = AuditResult::new(Postulate::LocalObservability, Status::Holds);
    for pair in &m.ghost_pairs {
        let local = (local_matrix(&pair.first) - local_matrix(&pair.second)).amax();
        let diff = extended_action(&pair.first, &state) - extended_action(&pair.second, &state);
        let bipartite = diff.norm();
        if local <= eps && bipartite > eps {
            return AuditResult::new(Postulate::LocalObservability, Status::Fails)
                .with_value(bipartite)
                .with_witness(Witness::matrix("operator", Some(pair.label.clone()), &diff))
                .note(format!("{}: same local action, different action on the faithful state", pair.label))
                .detail("local_difference", local)
                .detail("bipartite_difference", bipartite);
        }
        result = result.note(format!("{}: distinguishable locally or on neither side", pair.label));
    }
    result
}
