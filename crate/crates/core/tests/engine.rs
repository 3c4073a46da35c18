use std::collections::{BTreeMap, BTreeSet};

use trade_core::domain::{LeagueRules, Position, SlotRule, Team};
use trade_core::engine::{
    build_trade, generate_trades, integer_scale, BuildOptions, EngineConfig, ModeView, PersonalizationRequest,
    PersonalizationWeights, TradeContext,
};
use trade_core::sheet::{SheetEntry, ValuationSheet};
use trade_core::synthetic::{player, sample_profiles, synthetic_league, SyntheticSpec};
use trade_core::valuation::roster_adjustments;
use trade_core::{batch_valuate, BatchConfig, ComputeMode, League, SmeWeights, TradeError};

fn sheet(values: &[(&str, f64)]) -> ValuationSheet {
    ValuationSheet {
        compute_mode: ComputeMode::Sme,
        generated_at: "1970-01-01T00:00:00Z".into(),
        sme_low: 0.0,
        sme_high: 1.0,
        entries: values
            .iter()
            .map(|&(id, valuation)| SheetEntry {
                player_id: id.into(),
                valuation,
                cost: None,
                boom: 0.0,
                bust: 0.0,
                percent_owned: 0.5,
                opponent_rank: 16,
                games_left: 8,
                season_actual: 0.0,
                season_projection: 0.0,
            })
            .collect(),
    }
}

fn opts(risk: f64, weights: &PersonalizationWeights) -> BuildOptions<'_> {
    BuildOptions { risk, max_items: 3, pairing_angle: 45.0, weights }
}

fn one_on_one() -> League {
    League {
        rules: LeagueRules { slot_rules: vec![SlotRule::new("QB", &[Position::QB], 1)], team_count: 2, current_week: 3 },
        teams: vec![
            Team { team_id: "A".into(), roster: vec!["qa".into()] },
            Team { team_id: "B".into(), roster: vec!["qb".into()] },
        ],
        players: vec![player("qa", Position::QB, 250.0), player("qb", Position::QB, 240.0)],
    }
}

#[test]
fn single_player_teams_swap() {
    let league = one_on_one();
    let ctx = TradeContext::new(&league).unwrap();
    let s = sheet(&[("qa", 0.9), ("qb", 0.8)]);
    let view = ModeView::new(&s);
    let w = PersonalizationWeights::default();
    let t = build_trade(&ctx, &view, "A", "B", &PersonalizationRequest::default(), opts(1.0, &w)).unwrap().unwrap();
    assert_eq!(t.a_receives, vec!["qb"]);
    assert_eq!(t.b_receives, vec!["qa"]);
    assert_eq!(t.fingerprint, "qa+qb");
}

#[test]
fn tiny_risk_yields_no_trade() {
    let league = one_on_one();
    let ctx = TradeContext::new(&league).unwrap();
    assert!(ctx.cost("qa") > 1 && ctx.cost("qb") > 1);
    let s = sheet(&[("qa", 0.9), ("qb", 0.8)]);
    let w = PersonalizationWeights::default();
    let t = build_trade(&ctx, &ModeView::new(&s), "A", "B", &PersonalizationRequest::default(), opts(0.01, &w)).unwrap();
    assert!(t.is_none());
}

fn three_on_three() -> League {
    use Position::*;
    let players = vec![
        player("a1", RB, 220.0),
        player("a2", WR, 180.0),
        player("a3", TE, 90.0),
        player("b1", RB, 200.0),
        player("b2", WR, 210.0),
        player("b3", QB, 260.0),
    ];
    League {
        rules: LeagueRules {
            slot_rules: vec![
                SlotRule::new("QB", &[QB], 1),
                SlotRule::new("RB", &[RB], 1),
                SlotRule::new("WR", &[WR], 1),
                SlotRule::new("TE", &[TE], 1),
            ],
            team_count: 2,
            current_week: 4,
        },
        teams: vec![
            Team { team_id: "A".into(), roster: vec!["a1".into(), "a2".into(), "a3".into()] },
            Team { team_id: "B".into(), roster: vec!["b1".into(), "b2".into(), "b3".into()] },
        ],
        players,
    }
}

/// Best subset by exhaustive enumeration with the documented tie-break.
fn enumerate(items: &[(String, u32, u32)], capacity: u32) -> Vec<String> {
    let mut best: (u32, Vec<String>) = (0, Vec::new());
    for mask in 1u32..(1 << items.len()) {
        let chosen: Vec<&(String, u32, u32)> = (0..items.len()).filter(|i| mask & (1 << i) != 0).map(|i| &items[i]).collect();
        if chosen.len() > 3 || chosen.iter().map(|c| c.2).sum::<u32>() > capacity {
            continue;
        }
        let value: u32 = chosen.iter().map(|c| c.1).sum();
        let mut ids: Vec<String> = chosen.iter().map(|c| c.0.clone()).collect();
        ids.sort();
        if value > best.0 || (value == best.0 && (ids.len(), &ids) < (best.1.len(), &best.1)) {
            best = (value, ids);
        }
    }
    best.1
}

#[test]
fn three_on_three_matches_enumeration() {
    let league = three_on_three();
    let ctx = TradeContext::new(&league).unwrap();
    let s = sheet(&[("a1", 0.7), ("a2", 0.55), ("a3", 0.3), ("b1", 0.65), ("b2", 0.6), ("b3", 0.95)]);
    let view = ModeView::new(&s);
    let w = PersonalizationWeights::default();
    let table = league.player_table();
    for risk in [1.0, 0.8, 0.6, 0.4] {
        let side = |from: &str, to: &str| {
            let sender = ctx.roster(from).unwrap();
            let receiver = ctx.roster(to).unwrap();
            let items: Vec<(String, u32, u32)> = sender
                .iter()
                .map(|p| {
                    let v = roster_adjustments(view.fraction(&p.player_id), table.get(&p.player_id).unwrap(), receiver, &league.rules);
                    (p.player_id.clone(), integer_scale(v), ctx.cost(&p.player_id))
                })
                .collect();
            let cmax = items.iter().map(|i| i.2).max().unwrap();
            enumerate(&items, (risk * f64::from(cmax) + 1e-9).floor() as u32)
        };
        let (a, b) = (side("B", "A"), side("A", "B"));
        let t = build_trade(&ctx, &view, "A", "B", &PersonalizationRequest::default(), opts(risk, &w)).unwrap();
        if a.is_empty() || b.is_empty() {
            assert!(t.is_none());
        } else {
            let t = t.unwrap();
            assert_eq!(t.a_receives, a, "risk {risk}");
            assert_eq!(t.b_receives, b, "risk {risk}");
        }
    }
}

fn fixture() -> (League, Vec<ValuationSheet>) {
    let league = synthetic_league(&SyntheticSpec::default());
    let out = batch_valuate(&league, &sample_profiles(), &SmeWeights::default(), &BatchConfig::default()).unwrap();
    (league, out.sheets)
}

#[test]
fn generation_is_deterministic_and_deduplicated() {
    let (league, sheets) = fixture();
    let cfg = EngineConfig::default();
    let req = PersonalizationRequest::default();
    let mut any = false;
    for team in ["T1", "T2", "T3", "T4"] {
        let first = generate_trades(&league, team, &req, &sheets, &cfg).unwrap();
        let second = generate_trades(&league, team, &req, &sheets, &cfg).unwrap();
        assert_eq!(first, second);
        assert!(first.trades.len() <= cfg.max_results);
        let fps: BTreeSet<&str> = first.trades.iter().map(|t| t.fingerprint.as_str()).collect();
        assert_eq!(fps.len(), first.trades.len());
        for pair in first.trades.windows(2) {
            assert!(pair[0].insights.unwrap().upside >= pair[1].insights.unwrap().upside);
        }
        any |= !first.trades.is_empty();
    }
    assert!(any);
}

#[test]
fn identical_trade_from_two_risk_levels_appears_once() {
    let (league, sheets) = fixture();
    let mut cfg = EngineConfig::default();
    cfg.risk_levels = vec![1.0, 1.0];
    cfg.filters.disabled = trade_core::insights::RuleId::ALL.into_iter().collect();
    cfg.max_results = usize::MAX;
    let once = EngineConfig { risk_levels: vec![1.0], ..cfg.clone() };
    let req = PersonalizationRequest::default();
    let doubled = generate_trades(&league, "T5", &req, &sheets, &cfg).unwrap();
    let single = generate_trades(&league, "T5", &req, &sheets, &once).unwrap();
    assert_eq!(doubled.trades, single.trades);
}

#[test]
fn personalization_is_honoured() {
    let (league, sheets) = fixture();
    let team = league.team("T2").unwrap().clone();
    let mut cfg = EngineConfig::default();
    cfg.filters.disabled = trade_core::insights::RuleId::ALL.into_iter().collect();
    cfg.max_results = usize::MAX;
    let opponent = league.team("T7").unwrap();

    let star = team.roster[0].clone();
    let mut req = PersonalizationRequest::default();
    req.untradables.insert(star.clone());
    req.must_release.insert(team.roster[3].clone());
    let out = generate_trades(&league, "T2", &req, &sheets, &cfg).unwrap();
    assert!(!out.trades.is_empty());
    for t in &out.trades {
        assert!(!t.b_receives.contains(&star) && !t.a_receives.contains(&star));
        assert!(t.b_receives.contains(&team.roster[3]));
    }

    let mut req = PersonalizationRequest::default();
    req.must_acquire.insert(opponent.roster[1].clone());
    let out = generate_trades(&league, "T2", &req, &sheets, &cfg).unwrap();
    for t in &out.trades {
        assert_eq!(t.team_b, "T7");
        assert!(t.a_receives.contains(&opponent.roster[1]));
    }
}

#[test]
fn invalid_requests_are_errors() {
    let (league, sheets) = fixture();
    let cfg = EngineConfig::default();
    let err = |req: PersonalizationRequest, team: &str| generate_trades(&league, team, &req, &sheets, &cfg).unwrap_err();
    assert_eq!(err(PersonalizationRequest::with_risk(0.0), "T1"), TradeError::InvalidRisk(0.0));
    assert!(matches!(err(PersonalizationRequest::default(), "T99"), TradeError::UnknownTeam(_)));
    let mut req = PersonalizationRequest::default();
    req.must_release.insert(league.team("T3").unwrap().roster[0].clone());
    assert!(matches!(err(req, "T1"), TradeError::ReleaseNotOwned(_)));
    let mut req = PersonalizationRequest::default();
    req.watchlist.insert("nobody".into());
    assert!(matches!(err(req, "T1"), TradeError::UnknownPlayer(_)));
}

#[test]
fn modes_are_reported_per_trade() {
    let (league, sheets) = fixture();
    let out = generate_trades(&league, "T1", &PersonalizationRequest::default(), &sheets, &EngineConfig::default()).unwrap();
    let modes: BTreeMap<ComputeMode, usize> = out.trades.iter().fold(BTreeMap::new(), |mut m, t| {
        *m.entry(t.compute_mode).or_insert(0) += 1;
        m
    });
    assert_eq!(modes.values().sum::<usize>(), out.trades.len());
}
