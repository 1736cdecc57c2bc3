//! Fixtures shared by the criterion benches.

use pyralign_core::profile::profile_of_row;
use pyralign_core::simulate::{random_reference, simulate_reads, SimulationConfig};
use pyralign_core::{
    local_align, AlignedSequence, Alphabet, Profile, Read, ScoringScheme, Sequence,
};

pub fn reference(len: usize) -> Sequence {
    random_reference("ref", len, &Alphabet::dna(), 17)
}

pub fn reads(reference: &Sequence, count: usize, length: usize) -> Vec<Read> {
    let config = SimulationConfig {
        count,
        read_length: length,
        substitution_rate: 0.01,
        indel_rate: 0.0,
        seed: 23,
    };
    simulate_reads(reference, &Alphabet::dna(), &config)
        .expect("fixture parameters are valid")
        .reads
}

/// A two-member profile from locally aligning neighbouring reads, the shape
/// the merge stage starts from.
pub fn pair_profile(a: &Sequence, b: &Sequence, scheme: &ScoringScheme) -> Profile {
    let pa = local_align(a, b, scheme).expect("non-empty reads");
    pyralign_core::profile_of_pairwise(&pa, scheme.alphabet())
        .expect("rows share the scheme alphabet")
}

pub fn row_profile(seq: &Sequence) -> Profile {
    profile_of_row(AlignedSequence::from_sequence(seq), &Alphabet::dna()).expect("dna row")
}
