use std::collections::HashSet;
use std::rc::Rc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Param {
    pub name: String,
    #[serde(rename = "type")]
    pub type_name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperationSig {
    pub name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<Param>,
}

impl OperationSig {
    pub fn new(name: &str) -> Self {
        OperationSig {
            name: name.to_string(),
            params: Vec::new(),
        }
    }

    pub fn with_param(mut self, name: &str, type_name: &str) -> Self {
        self.params.push(Param {
            name: name.to_string(),
            type_name: type_name.to_string(),
        });
        self
    }
}

/// A named set of operations a port provides or requires.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterfaceSpec {
    pub name: String,
    #[serde(default)]
    pub operations: Vec<OperationSig>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("interface {interface}: duplicate operation `{operation}`")]
pub struct DuplicateOperation {
    pub interface: String,
    pub operation: String,
}

impl InterfaceSpec {
    pub fn new(name: &str, operations: Vec<OperationSig>) -> Result<Self, DuplicateOperation> {
        let spec = InterfaceSpec {
            name: name.to_string(),
            operations,
        };
        spec.check_unique()?;
        Ok(spec)
    }

    pub fn check_unique(&self) -> Result<(), DuplicateOperation> {
        let mut seen = HashSet::new();
        for op in &self.operations {
            if !seen.insert(op.name.as_str()) {
                return Err(DuplicateOperation {
                    interface: self.name.clone(),
                    operation: op.name.clone(),
                });
            }
        }
        Ok(())
    }

    pub fn has_operation(&self, name: &str) -> bool {
        self.operations.iter().any(|op| op.name == name)
    }
}

/// The four silo CPC kinds of the plant, named after their capabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SiloKind {
    Silo,
    HSilo,
    MSilo,
    MHSilo,
}

impl SiloKind {
    pub fn from_capabilities(heater: bool, mixer: bool) -> Self {
        match (heater, mixer) {
            (false, false) => SiloKind::Silo,
            (true, false) => SiloKind::HSilo,
            (false, true) => SiloKind::MSilo,
            (true, true) => SiloKind::MHSilo,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SiloKind::Silo => "Silo",
            SiloKind::HSilo => "HSilo",
            SiloKind::MSilo => "MSilo",
            SiloKind::MHSilo => "MHSilo",
        }
    }

    fn heater(self) -> bool {
        matches!(self, SiloKind::HSilo | SiloKind::MHSilo)
    }

    fn mixer(self) -> bool {
        matches!(self, SiloKind::MSilo | SiloKind::MHSilo)
    }

    /// Services the silo controller offers to its process (`MHSiloIf`).
    pub fn service_interface(self) -> InterfaceSpec {
        let mut ops = vec![
            OperationSig::new("fill"),
            OperationSig::new("empty"),
            OperationSig::new("cancel"),
        ];
        if self.heater() {
            ops.push(OperationSig::new("heatToTemp").with_param("setpoint", "REAL"));
        }
        if self.mixer() {
            ops.push(OperationSig::new("mix").with_param("duration", "REAL"));
        }
        InterfaceSpec {
            name: format!("{}If", self.name()),
            operations: ops,
        }
    }

    /// Completion callbacks the process offers back (`Process2MHSiloIf`).
    pub fn callback_interface(self) -> InterfaceSpec {
        let mut ops = vec![
            OperationSig::new("fillingCompleted"),
            OperationSig::new("pouringCompleted"),
        ];
        if self.heater() {
            ops.push(OperationSig::new("heatingCompleted"));
        }
        if self.mixer() {
            ops.push(OperationSig::new("mixingCompleted"));
        }
        InterfaceSpec {
            name: format!("Process2{}If", self.name()),
            operations: ops,
        }
    }

    /// What the controller offers its driver (`MHSiloCtrl2DriverIf`).
    pub fn controller_to_driver_interface(self) -> InterfaceSpec {
        let mut ops = vec![
            OperationSig::new("emptyChanged").with_param("value", "BOOL"),
            OperationSig::new("fullChanged").with_param("value", "BOOL"),
        ];
        if self.heater() {
            ops.push(OperationSig::new("tempChanged").with_param("value", "REAL"));
        }
        InterfaceSpec {
            name: format!("{}Ctrl2DriverIf", self.name()),
            operations: ops,
        }
    }

    /// What the driver offers the controller (`MHSiloDriver2ControllerIf`).
    pub fn driver_to_controller_interface(self) -> InterfaceSpec {
        let mut ops = vec![
            OperationSig::new("setInValve").with_param("on", "BOOL"),
            OperationSig::new("setOutValve").with_param("on", "BOOL"),
        ];
        if self.heater() {
            ops.push(OperationSig::new("setHeater").with_param("on", "BOOL"));
        }
        if self.mixer() {
            ops.push(OperationSig::new("setMixer").with_param("on", "BOOL"));
        }
        InterfaceSpec {
            name: format!("{}Driver2ControllerIf", self.name()),
            operations: ops,
        }
    }
}

/// Interface pair for each silo kind, shared by every port of that kind.
#[derive(Debug, Clone)]
pub struct SiloInterfaces {
    pub service: Rc<InterfaceSpec>,
    pub callbacks: Rc<InterfaceSpec>,
    pub ctrl_to_driver: Rc<InterfaceSpec>,
    pub driver_to_ctrl: Rc<InterfaceSpec>,
}

impl SiloInterfaces {
    pub fn for_kind(kind: SiloKind) -> Self {
        SiloInterfaces {
            service: Rc::new(kind.service_interface()),
            callbacks: Rc::new(kind.callback_interface()),
            ctrl_to_driver: Rc::new(kind.controller_to_driver_interface()),
            driver_to_ctrl: Rc::new(kind.driver_to_controller_interface()),
        }
    }
}
