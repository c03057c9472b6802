use qxor_core::oracle::worst_case_error;
use qxor_core::protocol::{ProtocolInstance, Termination};
use qxor_core::rng::seeded;
use qxor_core::{description::parse_function, run_networked, BitVector, Family};

#[test]
fn equality_2_is_exact_on_every_input() {
    let f = Family::Equality.build(2).unwrap();
    let inst = ProtocolInstance::exact(f.clone(), 0).unwrap();
    assert_eq!(inst.degree(), 2);
    assert_eq!(inst.sparsity(), 4);
    assert!(worst_case_error(&f, &f.to_real()).unwrap().exact_error < 1e-12);
    let mut rng = seeded(1);
    for x in BitVector::all(2) {
        for y in BitVector::all(2) {
            assert_eq!(inst.run(x, y, &mut rng).unwrap().0, f.evaluate_xor(x, y));
        }
    }
}

#[test]
fn networked_and2_exhaustive() {
    let f = Family::And.build(2).unwrap();
    let inst = ProtocolInstance::exact(f.clone(), 0).unwrap();
    let mut saw_t_zero = false;
    for (i, x) in BitVector::all(2).enumerate() {
        for (j, y) in BitVector::all(2).enumerate() {
            for rep in 0..4 {
                let net = run_networked(&inst, x, y, &mut seeded((i * 16 + j * 4 + rep) as u64)).unwrap();
                assert_eq!(net.answer, f.evaluate_xor(x, y));
                assert_eq!(net.alice_ledger.total(), net.transcript.total_qubits);
                saw_t_zero |= net.transcript.terminated_by == Termination::TZero;
            }
        }
    }
    assert!(saw_t_zero);
}

#[test]
fn bob_is_built_without_x() {
    let f = parse_function("n=3\nkind=anf\nz1*z2 + z3\n").unwrap();
    let inst = ProtocolInstance::exact(f, 0).unwrap();
    let bob = inst.bob(BitVector::new(3, 0b101).unwrap()).unwrap();
    assert_eq!(bob.public().degree(), 2);
    assert!(!bob.is_finished());
}
