use redundex::codes::{build_protocol, builtin_code, flip_records_with_weight, Protocol, ProtocolKind, CODE_NAMES};
use redundex::decode::{
    observed_record, DecodePolicy, Decoded, Decoder, Event, Flips, LookupTable, Ranking, TieOutcome,
};
use redundex::designs::builtin;
use redundex::pauli::{Pauli, PauliOperator};

fn all_protocols() -> Vec<Protocol> {
    let mut out = Vec::new();
    for name in CODE_NAMES {
        let code = builtin_code(name).unwrap();
        for kind in code.kinds() {
            out.push(build_protocol(&code, kind).unwrap());
        }
    }
    out
}

fn policies() -> Vec<DecodePolicy> {
    vec![
        DecodePolicy::default(),
        DecodePolicy::first_in_order(),
        DecodePolicy {
            ranking: Ranking::LikelihoodAt { p_q: 0.01, p_m: 0.05 },
            tie_outcome: TieOutcome::AmbiguousIsFailure,
        },
    ]
}

#[test]
fn table_matches_direct_decode_everywhere() {
    for p in all_protocols() {
        assert!(p.m() <= 15);
        for policy in policies() {
            let direct = Decoder::new(&p, policy).unwrap();
            let table = LookupTable::build(&p, policy).unwrap();
            for s in 0u64..1 << p.m() {
                assert_eq!(table.get(s), direct.decode_syndrome(s), "{} syndrome {s:b}", p.label());
            }
        }
    }
}

#[test]
fn clean_records_need_no_correction() {
    for p in all_protocols() {
        for policy in policies() {
            let d = Decoder::new(&p, policy).unwrap();
            let len = match p.schedule() {
                redundex::Schedule::SingleRound => p.m(),
                redundex::Schedule::RepeatMajority => 2 * p.m(),
            };
            let got = d.decode(&vec![false; len]).unwrap();
            assert_eq!(got, Decoded::Correction(PauliOperator::identity(p.n_qubits())));
        }
    }
}

#[test]
fn single_qubit_errors_are_corrected() {
    for p in all_protocols() {
        let d = Decoder::new(&p, DecodePolicy::default()).unwrap();
        let n = p.n_qubits();
        let clean = flip_records_with_weight(&p, 0)[0];
        let mut errors = vec![PauliOperator::identity(n)];
        for q in 0..n {
            for &pauli in p.alphabet().paulis() {
                errors.push(PauliOperator::single(n, q, pauli));
            }
        }
        for e in errors {
            assert!(
                d.success(&Event { error: e, flips: clean }).unwrap(),
                "{} {e}",
                p.label()
            );
        }
    }
}

fn x(n: usize, q: usize) -> PauliOperator {
    PauliOperator::single(n, q, Pauli::X)
}

#[test]
fn bitflip_dbr_single_error_with_single_flip_fails() {
    let p = build_protocol(&builtin_code("bitflip").unwrap(), ProtocolKind::Dbr).unwrap();
    let d = Decoder::new(&p, DecodePolicy::default()).unwrap();
    let mut failures = 0;
    for q in 0..3 {
        for f in flip_records_with_weight(&p, 1) {
            failures += usize::from(
                !d.success(&Event {
                    error: x(3, q),
                    flips: f,
                })
                .unwrap(),
            );
        }
    }
    assert_eq!(failures, 9);
}

#[test]
fn steane_dbr_tolerates_one_fault_of_each_kind() {
    let p = build_protocol(&builtin_code("steane").unwrap(), ProtocolKind::Dbr).unwrap();
    let d = Decoder::new(&p, DecodePolicy::default()).unwrap();
    let mut checked = 0;
    for q in 0..7 {
        for f in flip_records_with_weight(&p, 1) {
            assert!(d
                .success(&Event {
                    error: x(7, q),
                    flips: f
                })
                .unwrap());
            checked += 1;
        }
    }
    assert_eq!(checked, 49);
    for b in 0..=2 {
        for f in flip_records_with_weight(&p, b) {
            let e = PauliOperator::identity(7);
            assert!(d.success(&Event { error: e, flips: f }).unwrap());
        }
    }
}

#[test]
fn ambiguity_only_far_from_codewords() {
    let steane = build_protocol(&builtin_code("steane").unwrap(), ProtocolKind::Dbr).unwrap();
    let t = LookupTable::build(&steane, DecodePolicy::default()).unwrap();
    assert_eq!(t.entries().len(), 128);
    for s in 0u64..128 {
        if s.count_ones() <= 2 {
            assert_ne!(t.get(s), Decoded::Ambiguous, "{s:b}");
        }
    }
    let p5 = build_protocol(&builtin_code("perfect5").unwrap(), ProtocolKind::Dbr).unwrap();
    let t = LookupTable::build(&p5, DecodePolicy::default()).unwrap();
    assert_eq!(t.entries().len(), 1 << 15);
    for s in 0u64..1 << 15 {
        if s.count_ones() <= 3 {
            assert_ne!(t.get(s), Decoded::Ambiguous, "{s:b}");
        }
    }
}

#[test]
fn repeat_schedule_records_have_adaptive_length() {
    let p = build_protocol(&builtin_code("steane").unwrap(), ProtocolKind::FtRepeatQec).unwrap();
    for b in 0..=4 {
        for f in flip_records_with_weight(&p, b) {
            let ev = Event {
                error: x(7, 2),
                flips: f,
            };
            assert_eq!(observed_record(&p, &ev).unwrap().len(), p.performed(&f));
        }
    }
}

/// Point permutations mapping the biplane's block set to itself.
fn biplane_automorphisms() -> Vec<(Vec<usize>, Vec<usize>)> {
    let d = builtin::biplane2();
    let blocks = d.blocks().to_vec();
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..7).collect();
    permute(&mut perm, 0, &mut |p| {
        let image: Vec<u64> = blocks
            .iter()
            .map(|&b| (0..7).filter(|&j| b >> j & 1 == 1).fold(0u64, |acc, j| acc | 1 << p[j]))
            .collect();
        let block_map: Option<Vec<usize>> = image.iter().map(|ib| blocks.iter().position(|b| b == ib)).collect();
        if let Some(map) = block_map {
            out.push((p.to_vec(), map));
        }
    });
    out
}

fn permute(v: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, f);
        v.swap(k, i);
    }
}

#[test]
fn biplane_success_is_automorphism_invariant() {
    let autos = biplane_automorphisms();
    assert_eq!(autos.len(), 168);
    let p = Protocol::from_design("biplane", &builtin::biplane2()).unwrap();
    let d = Decoder::new(&p, DecodePolicy::default()).unwrap();
    for (perm, block_map) in autos.iter().step_by(17) {
        for e_mask in 0u64..128 {
            if e_mask.count_ones() > 2 {
                continue;
            }
            let e = PauliOperator::x_on(7, e_mask);
            let pe = e.permuted(perm);
            for b in 0..=2 {
                for f in flip_records_with_weight(&p, b) {
                    let Flips::Single(bits) = f else { unreachable!() };
                    let moved = (0..7)
                        .filter(|&i| bits >> i & 1 == 1)
                        .fold(0u64, |acc, i| acc | 1 << block_map[i]);
                    let a = d.success(&Event { error: e, flips: f }).unwrap();
                    let b2 = d
                        .success(&Event {
                            error: pe,
                            flips: Flips::Single(moved),
                        })
                        .unwrap();
                    assert_eq!(a, b2, "perm {perm:?} error {e} flips {bits:b}");
                }
            }
        }
    }
}
