use crate::domain::{LeagueRules, PlayerRecord, Position};

fn rostered(position: Position, roster: &[&PlayerRecord]) -> u32 {
    roster.iter().filter(|p| p.position == position).count() as u32
}

/// Share of the acquiring team's players at `position` that would start:
/// `min(1, slots / rostered)`, or 1 when nobody is rostered there.
pub fn slot_need(rules: &LeagueRules, position: Position, acquiring_roster: &[&PlayerRecord]) -> f64 {
    let count = rostered(position, acquiring_roster);
    if count == 0 {
        return 1.0;
    }
    (f64::from(rules.slots_for(position)) / f64::from(count)).min(1.0)
}

/// `1 / (1 + surplus)` where surplus is depth beyond the starter slots.
pub fn depth_decay(rules: &LeagueRules, position: Position, acquiring_roster: &[&PlayerRecord]) -> f64 {
    let surplus = rostered(position, acquiring_roster).saturating_sub(rules.slots_for(position));
    1.0 / (1.0 + f64::from(surplus))
}

/// Lowers a broad valuation by the acquiring team's depth at the player's position.
pub fn roster_adjustments(
    valuation: f64,
    player: &PlayerRecord,
    acquiring_roster: &[&PlayerRecord],
    rules: &LeagueRules,
) -> f64 {
    valuation
        * slot_need(rules, player.position, acquiring_roster)
        * depth_decay(rules, player.position, acquiring_roster)
}
