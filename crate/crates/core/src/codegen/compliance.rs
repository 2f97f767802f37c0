use std::collections::BTreeSet;

use super::model::{CodegenError, ComponentModel, ErrorKind, Location};
use super::naming::to_st_identifier;

/// Outcome of a port compliance check; empty `violations` means the two
/// ports may be joined by a connector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplianceReport {
    pub violations: Vec<String>,
}

impl ComplianceReport {
    pub fn is_compliant(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Interfaces a block implements, directly or through its EXTENDS chain.
pub fn implemented_interfaces(model: &ComponentModel, block: &str) -> BTreeSet<String> {
    model
        .ancestry(block)
        .into_iter()
        .flat_map(|b| b.implements.iter().cloned())
        .collect()
}

/// Interface-typed members of a block, inherited ones included, as
/// `(member, interface)` pairs.
pub fn required_members(model: &ComponentModel, block: &str) -> Vec<(String, String)> {
    model
        .ancestry(block)
        .into_iter()
        .flat_map(|b| b.members.iter())
        .filter(|m| model.interface(&m.type_name).is_some())
        .map(|m| (m.name.clone(), m.type_name.clone()))
        .collect()
}

/// Two port blocks are compliant iff each implements the interface typing
/// the other's single required (interface-typed) member.
pub fn check_port_compliance(
    model: &ComponentModel,
    port_a: &str,
    port_b: &str,
) -> Result<ComplianceReport, CodegenError> {
    let a = to_st_identifier(port_a);
    let b = to_st_identifier(port_b);
    for (name, given) in [(&a, port_a), (&b, port_b)] {
        if model.block(name).is_none() {
            return Err(CodegenError::new(
                ErrorKind::UnknownBlock,
                format!("no block named `{given}`"),
                Location::path(given.to_string()),
            ));
        }
    }
    let mut violations = Vec::new();
    for (provider, requirer) in [(&a, &b), (&b, &a)] {
        let required = required_members(model, requirer);
        let [(member, iface)] = required.as_slice() else {
            violations.push(format!(
                "{requirer} must have exactly one interface-typed member, found {}",
                required.len()
            ));
            continue;
        };
        if !implemented_interfaces(model, provider).contains(iface) {
            violations.push(format!(
                "{requirer}.{member} requires {iface}, which {provider} does not implement"
            ));
        }
    }
    Ok(ComplianceReport { violations })
}
