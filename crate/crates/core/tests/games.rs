use std::collections::HashSet;
use std::sync::Arc;

use cylindra::games::{
    cone_script, legal_extensions, solve_game, verify_script, GameConfig, GraphArena, Network, NetworkArena, Winner,
};
use cylindra::rainbow::build_bf;
use cylindra::toposet::{all_sequences, square_frame, unit_frame, SetAlgebraUnit};
use cylindra::AtomStructure;

/// Every consistent complete labelling of `len` nodes, by brute force.
fn all_networks(at: &AtomStructure, len: usize, fixed: Option<&Network>) -> Vec<Network> {
    let tuples = all_sequences(len, at.n());
    let free: Vec<&Vec<usize>> = tuples
        .iter()
        .filter(|t| fixed.is_none_or(|f| t.iter().any(|&x| x >= f.len())))
        .collect();
    let mut out = Vec::new();
    let mut code = vec![0usize; free.len()];
    loop {
        let mut net = Network::new(at.n(), len);
        if let Some(f) = fixed {
            for t in all_sequences(f.len(), at.n()) {
                net.set(&t, f.label(&t).unwrap());
            }
        }
        for (t, &a) in free.iter().zip(&code) {
            net.set(t, a);
        }
        if net.violation(at).is_none() {
            out.push(net);
        }
        let mut k = 0;
        loop {
            if k == code.len() {
                return out;
            }
            code[k] += 1;
            if code[k] < at.len() {
                break;
            }
            code[k] = 0;
            k += 1;
        }
    }
}

fn pruned_triangle() -> AtomStructure {
    let base: Vec<String> = (0..3).map(|x| x.to_string()).collect();
    let pts = all_sequences(3, 2).into_iter().filter(|p| !(p.contains(&0) && p.contains(&2)));
    unit_frame(&SetAlgebraUnit::new(2, base, pts).unwrap(), None).unwrap()
}

#[test]
fn extensions_match_brute_force() {
    for at in [square_frame(2, 2, None).unwrap(), square_frame(3, 2, None).unwrap(), pruned_triangle()] {
        for start in all_networks(&at, 2, None) {
            let grown = all_networks(&at, 3, Some(&start));
            for t in all_sequences(2, 2) {
                let a = start.label(&t).unwrap();
                for i in 0..2 {
                    for b in at.cyl(i).succ(a).ones() {
                        let got: HashSet<Network> = legal_extensions(&at, &start, i, &t, b).unwrap().into_iter().collect();
                        let mut target = t.clone();
                        target[i] = 2;
                        let want: HashSet<Network> =
                            grown.iter().filter(|g| g.label(&target) == Some(b)).cloned().collect();
                        assert_eq!(got, want, "{t:?} i={i} atom={}", at.name(b));
                    }
                }
            }
        }
    }
}

#[test]
fn unrelated_atoms_are_rejected() {
    let at = square_frame(2, 2, None).unwrap();
    let start = all_networks(&at, 2, None).remove(0);
    let a = start.label(&[0, 1]).unwrap();
    let bad = (0..at.len()).find(|&b| !at.cyl(0).holds(a, b)).unwrap();
    assert!(legal_extensions(&at, &start, 0, &[0, 1], bad).is_err());
    assert!(legal_extensions(&at, &start, 2, &[0, 1], a).is_err());
}

#[test]
fn atom_order_does_not_change_the_winner() {
    let at = pruned_triangle();
    let reversed: Vec<usize> = (0..at.len()).rev().collect();
    let other = at.reordered(&reversed);
    for k in 1..=4 {
        let a = solve_game(&NetworkArena::new(Arc::new(at.clone())), &GameConfig::gk(k)).unwrap();
        let b = solve_game(&NetworkArena::new(Arc::new(other.clone())), &GameConfig::gk(k)).unwrap();
        assert_eq!(a.winner, b.winner, "k={k}");
    }
}

#[test]
fn square_set_algebras_resist_every_attack() {
    let at = Arc::new(square_frame(3, 2, None).unwrap());
    for k in 1..=5 {
        assert_eq!(solve_game(&NetworkArena::new(at.clone()), &GameConfig::gk(k)).unwrap().winner, Winner::Exists);
    }
}

#[test]
fn exists_wins_are_antitone() {
    let sig = build_bf(3).unwrap();
    let arena = GraphArena::new(&sig, 6).unwrap();
    let mut wins = Vec::new();
    for m in 3..=5 {
        for k in 1..=2 {
            wins.push((m, k, solve_game(&arena, &GameConfig::gmk(m, k)).unwrap().winner));
        }
    }
    for &(m, k, w) in &wins {
        if w == Winner::Exists {
            for &(m2, k2, w2) in &wins {
                if k2 <= k && m2 >= m {
                    assert_eq!(w2, Winner::Exists, "∃ wins ({m},{k}) but not ({m2},{k2})");
                }
            }
        }
    }
}

#[test]
fn cone_script_transcript_shape() {
    let sig = build_bf(3).unwrap();
    let arena = GraphArena::new(&sig, 7).unwrap();
    let report = verify_script(&arena, &cone_script(1..=5), &GameConfig::bold(7, 12)).unwrap();
    assert!(report.verified);
    let first = serde_json::to_value(&report.transcript[0]).unwrap();
    let mut keys: Vec<&str> = first.as_object().unwrap().keys().map(|k| k.as_str()).collect();
    keys.sort();
    assert_eq!(keys, ["move", "player", "position_hash", "round"]);
    let rounds: Vec<usize> = report.transcript.iter().map(|e| e.round).collect();
    assert!(rounds.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn too_few_nodes_break_the_cone_script() {
    // with five nodes the tints run out of room before ∃ does
    let sig = build_bf(3).unwrap();
    let arena = GraphArena::new(&sig, 5).unwrap();
    let report = verify_script(&arena, &cone_script(1..=5), &GameConfig::bold(5, 12)).unwrap();
    assert!(!report.verified);
}
