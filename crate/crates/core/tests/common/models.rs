//! Random valid component models in normalized naming.

use std::collections::BTreeSet;

use liqueur_plant::codegen::{
    is_elementary, is_keyword, to_st_identifier, BlockSpec, ComponentModel, Member, ELEMENTARY_TYPES,
};
use liqueur_plant::component::{InterfaceSpec, OperationSig};
use rand::seq::IndexedRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Names<'a, R: RngCore> {
    rng: &'a mut R,
    used: BTreeSet<String>,
}

impl<R: RngCore> Names<'_, R> {
    fn word(&mut self) -> String {
        const FIRST: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZ_";
        const REST: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_";
        let len = self.rng.random_range(1..10);
        let mut s = String::new();
        s.push(*FIRST.choose(self.rng).unwrap() as char);
        for _ in 1..len {
            s.push(*REST.choose(self.rng).unwrap() as char);
        }
        s
    }

    /// A fresh name, unique within this generator, that normalization
    /// leaves unchanged.
    fn fresh(&mut self, role_prefix: bool) -> String {
        loop {
            let mut s = self.word();
            if role_prefix && self.rng.random_bool(0.5) {
                s = format!("its{s}");
            }
            if to_st_identifier(&s) == s
                && !is_keyword(&s)
                && !is_elementary(&s)
                && self.used.insert(s.clone())
            {
                return s;
            }
        }
    }
}

pub fn random_model(seed: u64) -> ComponentModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_ifaces = rng.random_range(0..6);
    let n_blocks = rng.random_range(0..8);
    let mut names = Names { rng: &mut rng, used: BTreeSet::new() };
    let iface_names: Vec<String> = (0..n_ifaces).map(|_| names.fresh(false)).collect();
    let block_names: Vec<String> = (0..n_blocks).map(|_| names.fresh(false)).collect();
    let mut types: Vec<String> = ELEMENTARY_TYPES.iter().map(|t| t.to_string()).collect();
    types.extend(iface_names.iter().cloned());
    types.extend(block_names.iter().cloned());

    let interfaces = iface_names
        .iter()
        .map(|name| {
            let n_ops = names.rng.random_range(0..5);
            let operations = (0..n_ops)
                .map(|_| {
                    let mut op = OperationSig::new(&names.fresh(false));
                    for _ in 0..names.rng.random_range(0..3) {
                        let ty = types.choose(names.rng).unwrap().clone();
                        op = op.with_param(&names.fresh(false), &ty);
                    }
                    op
                })
                .collect();
            InterfaceSpec { name: name.clone(), operations }
        })
        .collect();

    let blocks = block_names
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let mut block = BlockSpec::new(name);
            if i > 0 && names.rng.random_bool(0.5) {
                block.extends = Some(block_names[names.rng.random_range(0..i)].clone());
            }
            if !iface_names.is_empty() {
                let k = names.rng.random_range(0..=iface_names.len().min(3));
                block.implements = iface_names
                    .choose_multiple(names.rng, k)
                    .cloned()
                    .collect();
            }
            for _ in 0..names.rng.random_range(0..5) {
                let ty = types.choose(names.rng).unwrap().clone();
                block.members.push(Member::new(&names.fresh(true), &ty));
            }
            for _ in 0..names.rng.random_range(0..3) {
                block.methods.push(names.fresh(false));
            }
            block
        })
        .collect();

    ComponentModel { interfaces, blocks }
}
