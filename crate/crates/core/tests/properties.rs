mod support;

use support::properties as p;

#[test]
fn jacobi_identity() {
    p::jacobi().unwrap();
}

#[test]
fn association_order() {
    p::association().unwrap();
}

#[test]
fn adjoint_involution() {
    p::adjoint().unwrap();
}

#[test]
fn substitution_homomorphism() {
    p::substitution().unwrap();
}

#[test]
fn print_parse_round_trip() {
    p::print_parse().unwrap();
}

#[test]
fn invariant_form_round_trip() {
    p::invariant_forms().unwrap();
}

#[test]
fn hamiltonian_invariant_round_trip() {
    p::hamiltonian_invariants().unwrap();
}
