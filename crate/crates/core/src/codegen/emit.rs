use std::fmt::Write;

use super::model::{BlockSpec, ComponentModel};
use crate::component::InterfaceSpec;

/// Emits the declarations of a validated model: interfaces first, then
/// blocks, each in model order, separated by a blank line. LF line endings,
/// no indentation. An empty model gives an empty document.
pub fn emit_st(model: &ComponentModel) -> String {
    let decls: Vec<String> = model
        .interfaces
        .iter()
        .map(emit_interface)
        .chain(model.blocks.iter().map(emit_block))
        .collect();
    decls.join("\n")
}

fn emit_interface(iface: &InterfaceSpec) -> String {
    let mut s = String::new();
    writeln!(s, "INTERFACE {}", iface.name).unwrap();
    for op in &iface.operations {
        if op.params.is_empty() {
            writeln!(s, "METHOD {} END_METHOD", op.name).unwrap();
        } else {
            writeln!(s, "METHOD {}", op.name).unwrap();
            s.push_str("VAR_INPUT\n");
            for p in &op.params {
                writeln!(s, "{}:{};", p.name, p.type_name).unwrap();
            }
            s.push_str("END_VAR\nEND_METHOD\n");
        }
    }
    s.push_str("END_INTERFACE\n");
    s
}

fn emit_block(block: &BlockSpec) -> String {
    let mut s = String::new();
    write!(s, "FUNCTION_BLOCK {}", block.name).unwrap();
    if let Some(parent) = &block.extends {
        write!(s, " EXTENDS {parent}").unwrap();
    }
    if !block.implements.is_empty() {
        write!(s, " IMPLEMENTS {}", block.implements.join(", ")).unwrap();
    }
    s.push('\n');
    for m in &block.members {
        writeln!(s, "{}:{};", m.name, m.type_name).unwrap();
    }
    for m in &block.methods {
        writeln!(s, "METHOD {m} END_METHOD").unwrap();
    }
    s.push_str("END_FUNCTION_BLOCK\n");
    s
}
