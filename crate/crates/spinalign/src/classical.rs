//! Classical spin alignment: computational-basis state tuples, the
//! site-by-site letter-flipping improvement algorithm, and an exhaustive
//! oracle over all classical assignments.
//!
//! A classical assignment picks one basis string t_I per subset in supp(μ).
//! Flipping every letter at a site to 1 transfers diagonal weight toward the
//! top string and can only push the spectrum up in majorization order, so
//! iterating over the sites walks any assignment to the conjectured one
//! along a majorization chain.

use std::collections::BTreeMap;

use crate::alignment::{conjectured_tuple, ProblemInstance};
use crate::error::{Error, Result};
use crate::majorization::Transfer;
use crate::norms::Objective;
use crate::tensor::{HermitianOperator, Spectrum, Subset};

/// Default cap on exhaustive assignment enumeration.
pub const DEFAULT_ENUM_CAP: u128 = 1_000_000;

/// One basis string per subset in supp(μ). Letters are stored as 0-based
/// digits; digit k stands for the basis vector ∣q_{k+1}⟩.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalAssignment(BTreeMap<Subset, Vec<u8>>);

impl ClassicalAssignment {
    pub fn new(map: BTreeMap<Subset, Vec<u8>>) -> ClassicalAssignment {
        ClassicalAssignment(map)
    }

    /// The conjectured assignment: every letter is 1 (digit 0).
    pub fn conjectured(inst: &ProblemInstance) -> ClassicalAssignment {
        Self::constant(inst, 0)
    }

    /// Every string filled with one digit; digit d−1 is the farthest start.
    pub fn constant(inst: &ProblemInstance, digit: u8) -> ClassicalAssignment {
        let map = inst
            .support()
            .into_iter()
            .map(|sub| (sub, vec![digit; sub.len()]))
            .collect();
        ClassicalAssignment(map)
    }

    pub fn get(&self, sub: Subset) -> Option<&[u8]> {
        self.0.get(&sub).map(|v| v.as_slice())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Subset, &Vec<u8>)> {
        self.0.iter()
    }

    pub fn validate_for(&self, inst: &ProblemInstance) -> Result<()> {
        for sub in inst.support() {
            let s = self
                .0
                .get(&sub)
                .ok_or_else(|| Error::MissingTupleEntry(sub.to_string()))?;
            if s.len() != sub.len() {
                return Err(Error::InvalidParameter(format!(
                    "string for {sub} has length {}, expected {}",
                    s.len(),
                    sub.len()
                )));
            }
            if s.iter().any(|&t| t as usize >= inst.d()) {
                return Err(Error::InvalidParameter(format!(
                    "string for {sub} uses letters outside 1..={}",
                    inst.d()
                )));
            }
        }
        Ok(())
    }

    /// 1-based letter strings, e.g. "{1,3} -> 21".
    pub fn display_strings(&self) -> Vec<(String, String)> {
        self.0
            .iter()
            .map(|(sub, s)| {
                let letters: String =
                    s.iter().map(|&t| char::from_digit(t as u32 + 1, 36).unwrap()).collect();
                (sub.to_string(), letters)
            })
            .collect()
    }
}

/// Diagonal of the alignment operator of a classical assignment, in
/// computational-basis order.
pub fn classical_diagonal(
    inst: &ProblemInstance,
    asg: &ClassicalAssignment,
) -> Result<Vec<f64>> {
    asg.validate_for(inst)?;
    let layout = inst.layout();
    let d = inst.d();
    let n = inst.n();
    let q = inst.qspec();
    let mut diag = vec![0.0; layout.dim()];
    let weights: Vec<usize> = (0..n).map(|i| d.pow((n - 1 - i) as u32)).collect();
    for (sub, &mu_w) in inst.mu() {
        let string = asg.get(*sub).expect("validated above");
        let in_sites: Vec<usize> = (0..n).filter(|i| sub.contains(i + 1)).collect();
        let out_sites: Vec<usize> = (0..n).filter(|i| !sub.contains(i + 1)).collect();
        let base: usize = string
            .iter()
            .zip(&in_sites)
            .map(|(&t, &i)| t as usize * weights[i])
            .sum();
        let comp_dim = d.pow(out_sites.len() as u32);
        let mut digits = vec![0usize; out_sites.len()];
        for comp in 0..comp_dim {
            let mut rem = comp;
            for k in (0..out_sites.len()).rev() {
                digits[k] = rem % d;
                rem /= d;
            }
            let offset: usize = digits.iter().zip(&out_sites).map(|(&t, &i)| t * weights[i]).sum();
            let qprod: f64 = digits.iter().map(|&t| q[t]).product();
            diag[base + offset] += mu_w * qprod;
        }
    }
    Ok(diag)
}

/// The (diagonal) alignment operator of a classical assignment.
pub fn classical_operator(
    inst: &ProblemInstance,
    asg: &ClassicalAssignment,
) -> Result<HermitianOperator> {
    Ok(HermitianOperator::from_real_diagonal(&classical_diagonal(inst, asg)?))
}

/// Flip every letter at `site` to 1, one source letter j at a time (j
/// ascending over 2..=d), and record the induced diagonal transfers: for
/// each basis string r of the other sites, the weight gathered at
/// (j, r) moves to (1, r). Transfers within one batch touch disjoint index
/// pairs and may be applied in any order.
pub fn classical_align_step(
    inst: &ProblemInstance,
    asg: &ClassicalAssignment,
    site: usize,
) -> Result<(ClassicalAssignment, Vec<Transfer>)> {
    if site < 1 || site > inst.n() {
        return Err(Error::IndexOutOfRange(site));
    }
    asg.validate_for(inst)?;
    let d = inst.d();
    let n = inst.n();
    let site_weight = d.pow((n - site) as u32);
    let mut current = asg.clone();
    let mut transfers = Vec::new();
    for j in 1..d as u8 {
        // terms whose letter at `site` is currently j
        let movers: Vec<Subset> = current
            .iter()
            .filter(|(sub, s)| {
                sub.contains(site) && {
                    let pos = sub.sites().iter().position(|&x| x == site).unwrap();
                    s[pos] == j
                }
            })
            .map(|(sub, _)| *sub)
            .collect();
        if movers.is_empty() {
            continue;
        }
        // diagonal weight carried by the movers, supported on digit j at `site`
        let mut moved = vec![0.0; inst.dim()];
        {
            let partial_mu: Vec<(Subset, f64)> =
                movers.iter().map(|sub| (*sub, inst.mu()[sub])).collect();
            let layout = inst.layout();
            let q = inst.qspec();
            let weights: Vec<usize> = (0..n).map(|i| d.pow((n - 1 - i) as u32)).collect();
            for (sub, mu_w) in partial_mu {
                let string = current.get(sub).unwrap();
                let in_sites: Vec<usize> = (0..n).filter(|i| sub.contains(i + 1)).collect();
                let out_sites: Vec<usize> = (0..n).filter(|i| !sub.contains(i + 1)).collect();
                let base: usize = string
                    .iter()
                    .zip(&in_sites)
                    .map(|(&t, &i)| t as usize * weights[i])
                    .sum();
                let comp_dim = d.pow(out_sites.len() as u32);
                let mut digits = vec![0usize; out_sites.len()];
                for comp in 0..comp_dim {
                    let mut rem = comp;
                    for k in (0..out_sites.len()).rev() {
                        digits[k] = rem % d;
                        rem /= d;
                    }
                    let offset: usize =
                        digits.iter().zip(&out_sites).map(|(&t, &i)| t * weights[i]).sum();
                    let qprod: f64 = digits.iter().map(|&t| q[t]).product();
                    moved[base + offset] += mu_w * qprod;
                }
                let _ = layout;
            }
        }
        for (idx, &amount) in moved.iter().enumerate() {
            if amount <= 0.0 {
                continue;
            }
            let digit_at_site = idx / site_weight % d;
            debug_assert_eq!(digit_at_site, j as usize);
            let receiver = idx - j as usize * site_weight;
            transfers.push(Transfer { receiver, giver: idx, amount });
        }
        // flip the letter in the assignment
        let mut map: BTreeMap<Subset, Vec<u8>> =
            current.iter().map(|(s, v)| (*s, v.clone())).collect();
        for sub in movers {
            let pos = sub.sites().iter().position(|&x| x == site).unwrap();
            map.get_mut(&sub).unwrap()[pos] = 0;
        }
        current = ClassicalAssignment(map);
    }
    Ok((current, transfers))
}

/// Walk an assignment to the conjectured one, site by site, recording the
/// assignment and sorted diagonal after every site that changed anything.
/// The spectra form a majorization chain ending at the conjectured tuple's
/// spectrum.
pub fn classical_align(
    inst: &ProblemInstance,
    start: &ClassicalAssignment,
) -> Result<Vec<(ClassicalAssignment, Spectrum)>> {
    let mut trajectory = Vec::new();
    let spec = Spectrum::from_unsorted(classical_diagonal(inst, start)?);
    trajectory.push((start.clone(), spec));
    let mut current = start.clone();
    for site in 1..=inst.n() {
        let (next, transfers) = classical_align_step(inst, &current, site)?;
        if next != current && !transfers.is_empty() {
            let spec = Spectrum::from_unsorted(classical_diagonal(inst, &next)?);
            trajectory.push((next.clone(), spec));
        }
        current = next;
    }
    Ok(trajectory)
}

fn enumeration_size(inst: &ProblemInstance) -> u128 {
    inst.support()
        .iter()
        .map(|sub| (inst.d() as u128).pow(sub.len() as u32))
        .product()
}

/// Exact maximum of several objectives over every classical assignment, in
/// one enumeration pass. Ties keep the lexicographically smallest
/// assignment. Enumeration size d^{Σ|I|} must stay within `cap`.
pub fn classical_brute_force_multi(
    inst: &ProblemInstance,
    objectives: &[Objective],
    cap: u128,
) -> Result<Vec<(ClassicalAssignment, f64)>> {
    for obj in objectives {
        obj.validate(inst.dim())?;
    }
    let size = enumeration_size(inst);
    if size > cap {
        return Err(Error::EnumerationTooLarge { size, cap });
    }
    let support = inst.support();
    let string_lens: Vec<usize> = support.iter().map(|s| s.len()).collect();
    let d = inst.d() as u8;
    // odometer over concatenated strings, most significant first:
    // counting up visits assignments in lexicographic order
    let total_letters: usize = string_lens.iter().sum();
    let mut digits = vec![0u8; total_letters];
    let mut best: Vec<Option<(ClassicalAssignment, f64)>> = vec![None; objectives.len()];
    loop {
        let mut map = BTreeMap::new();
        let mut offset = 0;
        for (sub, &len) in support.iter().zip(&string_lens) {
            map.insert(*sub, digits[offset..offset + len].to_vec());
            offset += len;
        }
        let asg = ClassicalAssignment::new(map);
        let diag = classical_diagonal(inst, &asg)?;
        for (slot, obj) in best.iter_mut().zip(objectives) {
            let val = obj.evaluate_eigenvalues(&diag)?;
            match slot {
                Some((_, cur)) if *cur >= val => {}
                _ => *slot = Some((asg.clone(), val)),
            }
        }
        // increment odometer
        let mut pos = total_letters;
        loop {
            if pos == 0 {
                return Ok(best.into_iter().map(Option::unwrap).collect());
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < d {
                break;
            }
            digits[pos] = 0;
        }
    }
}

/// Exact argmax of one objective over every classical assignment.
pub fn classical_brute_force(
    inst: &ProblemInstance,
    objective: Objective,
) -> Result<(ClassicalAssignment, f64)> {
    Ok(classical_brute_force_multi(inst, &[objective], DEFAULT_ENUM_CAP)?
        .pop()
        .expect("one objective in, one result out"))
}

/// Objective value of the conjectured tuple for the instance.
pub fn conjectured_value(inst: &ProblemInstance, objective: Objective) -> Result<f64> {
    let op = crate::alignment::build_alignment_operator(inst, &conjectured_tuple(inst))?;
    objective.evaluate(&op)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::majorization::{apply_transfer, majorizes, DEFAULT_TOL};
    use crate::sample;
    use approx::assert_relative_eq;
    use rand::Rng;

    fn half_half_instance() -> ProblemInstance {
        // n=1, d=2, μ_{1}=0.5, μ_∅=0.5, Q=diag(0.6,0.4)
        let q = Spectrum::from_sorted(vec![0.6, 0.4]).unwrap();
        ProblemInstance::new(2, 1, q, vec![(Subset::EMPTY, 0.5), (Subset::full(1), 0.5)])
            .unwrap()
    }

    fn random_instance<R: Rng + ?Sized>(rng: &mut R, dmax: usize, nmax: usize) -> ProblemInstance {
        loop {
            let d = rng.random_range(2..=dmax);
            let n = rng.random_range(1..=nmax);
            let q = sample::random_state_spectrum(d, rng);
            let mut subs: Vec<Subset> = Subset::all(n).collect();
            for i in (1..subs.len()).rev() {
                let j = rng.random_range(0..=i);
                subs.swap(i, j);
            }
            let k = rng.random_range(1..=3.min(subs.len()));
            let weights = sample::dirichlet_uniform(k, rng);
            let mu: Vec<(Subset, f64)> = subs.into_iter().take(k).zip(weights).collect();
            if let Ok(inst) = ProblemInstance::new(d, n, q, mu) {
                return inst;
            }
        }
    }

    #[test]
    fn diagonal_of_known_assignments() {
        let inst = half_half_instance();
        let mut map = BTreeMap::new();
        map.insert(Subset::EMPTY, vec![]);
        map.insert(Subset::full(1), vec![1]); // letter "2"
        let asg = ClassicalAssignment::new(map);
        let diag = classical_diagonal(&inst, &asg).unwrap();
        assert_relative_eq!(diag[0], 0.3, epsilon = 1e-12);
        assert_relative_eq!(diag[1], 0.7, epsilon = 1e-12);

        let conj = ClassicalAssignment::conjectured(&inst);
        let diag = classical_diagonal(&inst, &conj).unwrap();
        assert_relative_eq!(diag[0], 0.8, epsilon = 1e-12);
        assert_relative_eq!(diag[1], 0.2, epsilon = 1e-12);
    }

    #[test]
    fn conjectured_assignment_matches_conjectured_tuple_operator() {
        let mut rng = sample::seeded_rng(1);
        for _ in 0..20 {
            let inst = random_instance(&mut rng, 3, 3);
            let conj_cls = classical_operator(&inst, &ClassicalAssignment::conjectured(&inst))
                .unwrap();
            let conj_op = crate::alignment::build_alignment_operator(
                &inst,
                &crate::alignment::conjectured_tuple(&inst),
            )
            .unwrap();
            assert!(crate::tensor::max_abs(&(conj_cls.matrix() - conj_op.matrix())) < 1e-12);
        }
    }

    #[test]
    fn align_step_flips_and_majorizes_known_case() {
        let inst = half_half_instance();
        let mut map = BTreeMap::new();
        map.insert(Subset::EMPTY, vec![]);
        map.insert(Subset::full(1), vec![1]);
        let asg = ClassicalAssignment::new(map);
        let (next, transfers) = classical_align_step(&inst, &asg, 1).unwrap();
        assert_eq!(next.get(Subset::full(1)).unwrap(), &[0]);
        assert_eq!(transfers.len(), 1);
        assert_eq!(transfers[0].receiver, 0);
        assert_eq!(transfers[0].giver, 1);
        assert_relative_eq!(transfers[0].amount, 0.5, epsilon = 1e-12);
        let before = classical_diagonal(&inst, &asg).unwrap();
        let after = classical_diagonal(&inst, &next).unwrap();
        assert!(majorizes(&after, &before, DEFAULT_TOL).unwrap());
        // replaying the transfer takes the old diagonal to the new one
        let (replayed, _) = apply_transfer(&before, &transfers[0]).unwrap();
        for (a, b) in replayed.iter().zip(after.iter()) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn align_step_is_identity_on_aligned_sites() {
        let inst = half_half_instance();
        let conj = ClassicalAssignment::conjectured(&inst);
        let (next, transfers) = classical_align_step(&inst, &conj, 1).unwrap();
        assert_eq!(next, conj);
        assert!(transfers.is_empty());
        assert!(classical_align_step(&inst, &conj, 2).is_err());
    }

    #[test]
    fn align_step_majorizes_on_random_instances() {
        let mut rng = sample::seeded_rng(2);
        for _ in 0..200 {
            let inst = random_instance(&mut rng, 3, 2);
            // random start assignment
            let map: BTreeMap<Subset, Vec<u8>> = inst
                .support()
                .into_iter()
                .map(|sub| {
                    let s: Vec<u8> =
                        (0..sub.len()).map(|_| rng.random_range(0..inst.d()) as u8).collect();
                    (sub, s)
                })
                .collect();
            let asg = ClassicalAssignment::new(map);
            let site = rng.random_range(1..=inst.n());
            let (next, transfers) = classical_align_step(&inst, &asg, site).unwrap();
            let before = classical_diagonal(&inst, &asg).unwrap();
            let after = classical_diagonal(&inst, &next).unwrap();
            assert!(majorizes(&after, &before, DEFAULT_TOL).unwrap());
            // each transfer is unjust or unjust after a transposition:
            // the larger entry of the pair never decreases
            let mut running = before.clone();
            for tr in &transfers {
                let (stepped, unjust) = apply_transfer(&running, tr).unwrap();
                let old_hi = running[tr.receiver].max(running[tr.giver]);
                let new_hi = stepped[tr.receiver].max(stepped[tr.giver]);
                assert!(unjust || new_hi >= old_hi - 1e-12);
                running = stepped;
            }
        }
    }

    #[test]
    fn trajectory_reaches_conjectured_assignment() {
        let inst = half_half_instance();
        let mut map = BTreeMap::new();
        map.insert(Subset::EMPTY, vec![]);
        map.insert(Subset::full(1), vec![1]);
        let start = ClassicalAssignment::new(map);
        let traj = classical_align(&inst, &start).unwrap();
        assert_eq!(traj.len(), 2);
        assert_eq!(traj.last().unwrap().0, ClassicalAssignment::conjectured(&inst));

        // starting at the conjectured assignment: length-1 trajectory
        let traj = classical_align(&inst, &ClassicalAssignment::conjectured(&inst)).unwrap();
        assert_eq!(traj.len(), 1);
    }

    #[test]
    fn trajectory_is_a_majorization_chain() {
        let mut rng = sample::seeded_rng(3);
        for _ in 0..100 {
            let inst = random_instance(&mut rng, 3, 3);
            let start = ClassicalAssignment::constant(&inst, (inst.d() - 1) as u8);
            let traj = classical_align(&inst, &start).unwrap();
            for w in traj.windows(2) {
                assert!(majorizes(w[1].1.values(), w[0].1.values(), DEFAULT_TOL).unwrap());
            }
            // endpoint equals the conjectured-tuple spectrum
            let conj_spec = crate::alignment::build_alignment_operator(
                &inst,
                &crate::alignment::conjectured_tuple(&inst),
            )
            .unwrap()
            .spectrum()
            .unwrap();
            let last = &traj.last().unwrap().1;
            for (a, b) in last.values().iter().zip(conj_spec.values()) {
                assert_relative_eq!(a, b, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn brute_force_agrees_with_conjectured_tuple() {
        let mut rng = sample::seeded_rng(4);
        for _ in 0..25 {
            let inst = random_instance(&mut rng, 2, 2);
            for objective in [Objective::Fan(1), Objective::Schatten(2.0)] {
                let (best, value) = classical_brute_force(&inst, objective).unwrap();
                let conj = conjectured_value(&inst, objective).unwrap();
                assert!(value <= conj + 1e-9);
                assert_relative_eq!(value, conj, epsilon = 1e-9);
                // the conjectured assignment itself attains the maximum
                let conj_diag =
                    classical_diagonal(&inst, &ClassicalAssignment::conjectured(&inst)).unwrap();
                assert_relative_eq!(
                    objective.evaluate_eigenvalues(&conj_diag).unwrap(),
                    value,
                    epsilon = 1e-9
                );
                let _ = best;
            }
        }
    }

    #[test]
    fn brute_force_single_term_and_cap() {
        // single-term μ: every all-equal-letters assignment is optimal and
        // the best value is the objective of a pure classical product
        let q = Spectrum::from_sorted(vec![0.5, 0.5]).unwrap();
        let inst =
            ProblemInstance::new(2, 2, q, vec![(Subset::full(2), 1.0)]).unwrap();
        let (best, value) = classical_brute_force(&inst, Objective::Fan(1)).unwrap();
        assert_relative_eq!(value, 1.0, epsilon = 1e-12);
        assert_eq!(best.get(Subset::full(2)).unwrap(), &[0, 0]);

        // enumeration cap
        let err =
            classical_brute_force_multi(&inst, &[Objective::Fan(1)], 2).unwrap_err();
        assert!(matches!(err, Error::EnumerationTooLarge { .. }));
    }

    #[test]
    fn no_classical_assignment_beats_conjectured_spectrum() {
        let mut rng = sample::seeded_rng(5);
        for _ in 0..10 {
            let inst = random_instance(&mut rng, 2, 2);
            let conj_spec = crate::alignment::build_alignment_operator(
                &inst,
                &crate::alignment::conjectured_tuple(&inst),
            )
            .unwrap()
            .spectrum()
            .unwrap();
            // enumerate every assignment via the multi interface
            let support = inst.support();
            let lens: Vec<usize> = support.iter().map(|s| s.len()).collect();
            let total: usize = lens.iter().sum();
            let mut digits = vec![0u8; total];
            'outer: loop {
                let mut map = BTreeMap::new();
                let mut off = 0;
                for (sub, &len) in support.iter().zip(&lens) {
                    map.insert(*sub, digits[off..off + len].to_vec());
                    off += len;
                }
                let diag =
                    classical_diagonal(&inst, &ClassicalAssignment::new(map)).unwrap();
                assert!(majorizes(conj_spec.values(), &diag, DEFAULT_TOL).unwrap());
                let mut pos = total;
                loop {
                    if pos == 0 {
                        break 'outer;
                    }
                    pos -= 1;
                    digits[pos] += 1;
                    if digits[pos] < inst.d() as u8 {
                        break;
                    }
                    digits[pos] = 0;
                }
            }
        }
    }
}
