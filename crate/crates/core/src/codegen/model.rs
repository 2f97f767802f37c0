use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::naming::{is_elementary, is_identifier, is_keyword, to_st_identifier};
use crate::component::{InterfaceSpec, OperationSig, Param, SiloKind};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Member {
    pub name: String,
    #[serde(rename = "type")]
    pub type_name: String,
}

impl Member {
    pub fn new(name: &str, type_name: &str) -> Self {
        Member {
            name: name.to_string(),
            type_name: type_name.to_string(),
        }
    }
}

/// A FUNCTION_BLOCK declaration.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extends: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub implements: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub members: Vec<Member>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub methods: Vec<String>,
}

impl BlockSpec {
    pub fn new(name: &str) -> Self {
        BlockSpec {
            name: name.to_string(),
            extends: None,
            implements: Vec::new(),
            members: Vec::new(),
            methods: Vec::new(),
        }
    }

    pub fn extends(mut self, parent: &str) -> Self {
        self.extends = Some(parent.to_string());
        self
    }

    pub fn implements(mut self, interface: &str) -> Self {
        self.implements.push(interface.to_string());
        self
    }

    pub fn member(mut self, name: &str, type_name: &str) -> Self {
        self.members.push(Member::new(name, type_name));
        self
    }
}

/// Interfaces and function blocks to be declared, in emission order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentModel {
    #[serde(default)]
    pub interfaces: Vec<InterfaceSpec>,
    #[serde(default)]
    pub blocks: Vec<BlockSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorKind {
    Syntax,
    UnresolvedReference,
    CyclicInheritance,
    DuplicateName,
    UnknownBlock,
}

impl ErrorKind {
    pub fn code(self) -> &'static str {
        match self {
            ErrorKind::Syntax => "SYNTAX",
            ErrorKind::UnresolvedReference => "UNRESOLVED_REFERENCE",
            ErrorKind::CyclicInheritance => "CYCLIC_INHERITANCE",
            ErrorKind::DuplicateName => "DUPLICATE_NAME",
            ErrorKind::UnknownBlock => "UNKNOWN_BLOCK",
        }
    }
}

/// Where an error was found: a source position when parsing text, and a
/// path into the model (`blocks[2].members[0].type`).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Location {
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub path: String,
}

impl Location {
    pub fn at(line: usize, column: usize) -> Self {
        Location {
            line: Some(line),
            column: Some(column),
            path: String::new(),
        }
    }

    pub fn path(path: impl Into<String>) -> Self {
        Location {
            line: None,
            column: None,
            path: path.into(),
        }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "{l}:{c}")?,
            (Some(l), None) => write!(f, "line {l}")?,
            _ => {}
        }
        if !self.path.is_empty() {
            if self.line.is_some() {
                f.write_str(" ")?;
            }
            f.write_str(&self.path)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{} at {location}: {message}", kind.code())]
pub struct CodegenError {
    pub kind: ErrorKind,
    pub message: String,
    pub location: Location,
}

impl CodegenError {
    pub fn new(kind: ErrorKind, message: impl Into<String>, location: Location) -> Self {
        CodegenError {
            kind,
            message: message.into(),
            location,
        }
    }

    pub fn code(&self) -> &'static str {
        self.kind.code()
    }
}

/// Source lines of each declaration, when the model was parsed from text.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SourceLines {
    pub interfaces: Vec<usize>,
    pub blocks: Vec<usize>,
}

impl ComponentModel {
    pub fn interface(&self, name: &str) -> Option<&InterfaceSpec> {
        self.interfaces.iter().find(|i| i.name == name)
    }

    pub fn block(&self, name: &str) -> Option<&BlockSpec> {
        self.blocks.iter().find(|b| b.name == name)
    }

    pub fn is_empty(&self) -> bool {
        self.interfaces.is_empty() && self.blocks.is_empty()
    }

    /// Passes every name through [`to_st_identifier`].
    pub fn normalized(&self) -> ComponentModel {
        let n = |s: &String| to_st_identifier(s);
        ComponentModel {
            interfaces: self
                .interfaces
                .iter()
                .map(|i| InterfaceSpec {
                    name: n(&i.name),
                    operations: i
                        .operations
                        .iter()
                        .map(|op| OperationSig {
                            name: n(&op.name),
                            params: op
                                .params
                                .iter()
                                .map(|p| Param {
                                    name: n(&p.name),
                                    type_name: n(&p.type_name),
                                })
                                .collect(),
                        })
                        .collect(),
                })
                .collect(),
            blocks: self
                .blocks
                .iter()
                .map(|b| BlockSpec {
                    name: n(&b.name),
                    extends: b.extends.as_ref().map(n),
                    implements: b.implements.iter().map(n).collect(),
                    members: b
                        .members
                        .iter()
                        .map(|m| Member {
                            name: n(&m.name),
                            type_name: n(&m.type_name),
                        })
                        .collect(),
                    methods: b.methods.iter().map(n).collect(),
                })
                .collect(),
        }
    }

    /// Checks lexical validity, uniqueness, reference resolution and
    /// acyclic inheritance, in that order.
    pub fn validate(&self) -> Result<(), CodegenError> {
        self.validate_with(&SourceLines::default())
    }

    pub fn validate_with(&self, lines: &SourceLines) -> Result<(), CodegenError> {
        let iface_loc = |i: usize, rest: String| Location {
            line: lines.interfaces.get(i).copied(),
            column: None,
            path: format!("interfaces[{i}]{rest}"),
        };
        let block_loc = |i: usize, rest: String| Location {
            line: lines.blocks.get(i).copied(),
            column: None,
            path: format!("blocks[{i}]{rest}"),
        };
        let check_name = |name: &str, loc: Location| -> Result<(), CodegenError> {
            if !is_identifier(name) {
                return Err(CodegenError::new(
                    ErrorKind::Syntax,
                    format!("`{name}` is not an identifier"),
                    loc,
                ));
            }
            if is_keyword(name) {
                return Err(CodegenError::new(
                    ErrorKind::Syntax,
                    format!("`{name}` is a reserved word"),
                    loc,
                ));
            }
            Ok(())
        };

        // Lexical checks and uniqueness.
        let mut types: HashSet<&str> = HashSet::new();
        let dup = |what: &str, name: &str, loc: Location| {
            CodegenError::new(ErrorKind::DuplicateName, format!("duplicate {what} `{name}`"), loc)
        };
        for (i, iface) in self.interfaces.iter().enumerate() {
            check_name(&iface.name, iface_loc(i, ".name".into()))?;
            if is_elementary(&iface.name) || !types.insert(&iface.name) {
                return Err(dup("type name", &iface.name, iface_loc(i, ".name".into())));
            }
            let mut ops = HashSet::new();
            for (j, op) in iface.operations.iter().enumerate() {
                let loc = || iface_loc(i, format!(".operations[{j}]"));
                check_name(&op.name, loc())?;
                if !ops.insert(&op.name) {
                    return Err(dup("operation", &op.name, loc()));
                }
                let mut params = HashSet::new();
                for (k, p) in op.params.iter().enumerate() {
                    let loc = || iface_loc(i, format!(".operations[{j}].params[{k}]"));
                    check_name(&p.name, loc())?;
                    check_name(&p.type_name, loc())?;
                    if !params.insert(&p.name) {
                        return Err(dup("parameter", &p.name, loc()));
                    }
                }
            }
        }
        for (i, block) in self.blocks.iter().enumerate() {
            check_name(&block.name, block_loc(i, ".name".into()))?;
            if is_elementary(&block.name) || !types.insert(&block.name) {
                return Err(dup("type name", &block.name, block_loc(i, ".name".into())));
            }
            if let Some(parent) = &block.extends {
                check_name(parent, block_loc(i, ".extends".into()))?;
            }
            let mut implemented = HashSet::new();
            for (j, name) in block.implements.iter().enumerate() {
                let loc = || block_loc(i, format!(".implements[{j}]"));
                check_name(name, loc())?;
                if !implemented.insert(name) {
                    return Err(dup("implemented interface", name, loc()));
                }
            }
            let mut features = HashSet::new();
            for (j, m) in block.members.iter().enumerate() {
                let loc = || block_loc(i, format!(".members[{j}]"));
                check_name(&m.name, loc())?;
                check_name(&m.type_name, loc())?;
                if !features.insert(&m.name) {
                    return Err(dup("member", &m.name, loc()));
                }
            }
            for (j, m) in block.methods.iter().enumerate() {
                let loc = || block_loc(i, format!(".methods[{j}]"));
                check_name(m, loc())?;
                if !features.insert(m) {
                    return Err(dup("member or method", m, loc()));
                }
            }
        }

        // Resolution.
        let unresolved = |what: &str, name: &str, loc: Location| {
            CodegenError::new(
                ErrorKind::UnresolvedReference,
                format!("{what} `{name}` is not declared"),
                loc,
            )
        };
        let is_type = |t: &str| is_elementary(t) || types.contains(t);
        for (i, iface) in self.interfaces.iter().enumerate() {
            for (j, op) in iface.operations.iter().enumerate() {
                for (k, p) in op.params.iter().enumerate() {
                    if !is_type(&p.type_name) {
                        return Err(unresolved(
                            "type",
                            &p.type_name,
                            iface_loc(i, format!(".operations[{j}].params[{k}].type")),
                        ));
                    }
                }
            }
        }
        for (i, block) in self.blocks.iter().enumerate() {
            if let Some(parent) = &block.extends {
                if self.block(parent).is_none() {
                    return Err(unresolved("block", parent, block_loc(i, ".extends".into())));
                }
            }
            for (j, name) in block.implements.iter().enumerate() {
                if self.interface(name).is_none() {
                    return Err(unresolved(
                        "interface",
                        name,
                        block_loc(i, format!(".implements[{j}]")),
                    ));
                }
            }
            for (j, m) in block.members.iter().enumerate() {
                if !is_type(&m.type_name) {
                    return Err(unresolved(
                        "type",
                        &m.type_name,
                        block_loc(i, format!(".members[{j}].type")),
                    ));
                }
            }
        }

        // Inheritance.
        let index: BTreeMap<&str, usize> = self
            .blocks
            .iter()
            .enumerate()
            .map(|(i, b)| (b.name.as_str(), i))
            .collect();
        for (start, block) in self.blocks.iter().enumerate() {
            let mut seen = HashSet::from([start]);
            let mut cur = block;
            while let Some(parent) = &cur.extends {
                let p = index[parent.as_str()];
                if !seen.insert(p) {
                    return Err(CodegenError::new(
                        ErrorKind::CyclicInheritance,
                        format!("`{}` inherits from itself", block.name),
                        block_loc(start, ".extends".into()),
                    ));
                }
                cur = &self.blocks[p];
            }
        }
        Ok(())
    }

    /// `name` followed by its ancestors, nearest first. Assumes a
    /// validated model.
    pub fn ancestry<'a>(&'a self, name: &str) -> Vec<&'a BlockSpec> {
        let mut out: Vec<&BlockSpec> = Vec::new();
        let mut cur = self.block(name);
        while let Some(b) = cur {
            if out.iter().any(|x| x.name == b.name) {
                break;
            }
            out.push(b);
            cur = b.extends.as_deref().and_then(|p| self.block(p));
        }
        out
    }
}

/// The liqueur plant's component model in the paper's naming: interfaces of
/// every silo kind, controller and port blocks of each kind, and the
/// process-side port pairs of both recipes.
pub fn plant_model() -> ComponentModel {
    let kinds = [SiloKind::Silo, SiloKind::HSilo, SiloKind::MSilo, SiloKind::MHSilo];
    let mut interfaces = Vec::new();
    for kind in kinds {
        interfaces.push(kind.service_interface());
        interfaces.push(kind.callback_interface());
        interfaces.push(kind.controller_to_driver_interface());
        interfaces.push(kind.driver_to_controller_interface());
    }
    let mut blocks = vec![
        BlockSpec::new("Controller2ProcessPort"),
        BlockSpec::new("Controller2DriverPort"),
        BlockSpec::new("Process2ControllerPort"),
    ];
    for kind in kinds {
        let k = kind.name();
        blocks.push(
            BlockSpec::new(&format!("{k}Controller"))
                .member("itsProcessPort", &format!("{k}ProcessPort"))
                .member("itsDriverPort", &format!("{k}2DriverPort")),
        );
        blocks.push(
            BlockSpec::new(&format!("{k}ProcessPort"))
                .extends("Controller2ProcessPort")
                .implements(&format!("{k}If"))
                .member("itsProcess", &format!("Process2{k}If")),
        );
        blocks.push(
            BlockSpec::new(&format!("{k}2DriverPort"))
                .extends("Controller2DriverPort")
                .implements(&format!("{k}Ctrl2DriverIf"))
                .member("itsDriver", &format!("{k}Driver2ControllerIf")),
        );
    }
    for (process, silos) in [
        ("GenLiqueurA", [SiloKind::Silo, SiloKind::MHSilo]),
        ("GenLiqueurB", [SiloKind::HSilo, SiloKind::MSilo]),
    ] {
        let mut owner = BlockSpec::new(process);
        for kind in silos {
            let k = kind.name();
            let port = format!("{process}2{k}Port");
            blocks.push(
                BlockSpec::new(&port)
                    .extends("Process2ControllerPort")
                    .implements(&format!("Process2{k}If"))
                    .member("itsController", &format!("{k}If")),
            );
            owner = owner.member(&format!("its{k}Port"), &port);
        }
        blocks.push(owner);
    }
    ComponentModel { interfaces, blocks }
}
