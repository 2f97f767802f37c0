use std::cell::RefCell;
use std::rc::Rc;

use super::controller::SiloController;
use super::interface::SiloKind;
use super::port::Port;
use super::sr::SiloSr;
use crate::plant::SiloId;

/// Software part of a silo cyber-physical component: its SR and controller,
/// exposed to the outside through a single process port.
#[derive(Debug, Clone)]
pub struct SiloCpc {
    silo: SiloId,
    kind: SiloKind,
    sr: Rc<RefCell<SiloSr>>,
    controller: Rc<RefCell<SiloController>>,
}

impl SiloCpc {
    pub fn new(sr: Rc<RefCell<SiloSr>>) -> Self {
        let controller = SiloController::new(Rc::clone(&sr));
        let (silo, kind) = {
            let c = controller.borrow();
            (c.silo(), c.kind())
        };
        SiloCpc {
            silo,
            kind,
            sr,
            controller,
        }
    }

    pub fn silo(&self) -> SiloId {
        self.silo
    }

    pub fn kind(&self) -> SiloKind {
        self.kind
    }

    pub fn sr(&self) -> &Rc<RefCell<SiloSr>> {
        &self.sr
    }

    pub fn controller(&self) -> &Rc<RefCell<SiloController>> {
        &self.controller
    }

    /// Proxy port on the CPC boundary: forwards verbatim to the controller's
    /// full process port.
    pub fn process_port(&self) -> Rc<Port> {
        Rc::clone(self.controller.borrow().process_port())
    }
}
