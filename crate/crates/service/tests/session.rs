use coordplan_core::harness::{play_episode, PairSpec};
use coordplan_core::{
    generate_maze_pair, Action, AgentKind, AgentParams, GameConfig, GridPos, MazePair, MazeSide, PlayerId,
};
use coordplan_service::{ClientMessage, ClientView, ErrorCode, Phase, ServerMessage, Session, SessionSetup};
use proptest::prelude::*;

fn p(c: u32, r: u32) -> GridPos {
    GridPos::new(c, r)
}

/// Agent (E) side fully walled, human (H) side open except `(0,0)` Up.
fn walled_agent_pair() -> MazePair {
    let mut h = MazeSide::open(3, 3);
    h.set_passable(p(0, 0), Action::Up, false);
    MazePair::new(MazeSide::closed(3, 3), h).unwrap()
}

fn setup(pair: MazePair, start: PlayerId, kind: AgentKind) -> SessionSetup {
    SessionSetup {
        id: "t".into(),
        maze_id: None,
        pair,
        config: GameConfig {
            init: p(0, 0),
            goal: p(2, 2),
            initial_controller: start,
        },
        human_side: PlayerId::H,
        agent_kind: kind,
        params: AgentParams::default(),
        seed: 9,
        cap: 1000,
    }
}

fn human_first() -> Session {
    let (s, pushes) = Session::create(setup(walled_agent_pair(), PlayerId::H, AgentKind::IntentMcts)).unwrap();
    assert_eq!(pushes.len(), 1);
    assert!(matches!(pushes[0].message, ServerMessage::Created(_)));
    s
}

fn error_code(pushes: &[coordplan_service::Envelope<ServerMessage>]) -> Option<ErrorCode> {
    pushes.iter().find_map(|p| match p.message {
        ServerMessage::Error { code, .. } => Some(code),
        _ => None,
    })
}

#[test]
fn human_start_waits_for_human() {
    let s = human_first();
    assert_eq!(s.phase(), Phase::HumanTurn);
    let snap = s.snapshot();
    assert_eq!(snap.cell, p(0, 0));
    assert_eq!((snap.steps, snap.switches), (0, 0));
    assert_eq!(s.seq(), 1);
}

#[test]
fn blocked_move_is_rejected_without_history() {
    let mut s = human_first();
    let err = s.submit_action(Action::Up).unwrap_err();
    assert_eq!(err.code, ErrorCode::Blocked);
    assert!(s.agent().partner_history().is_empty());
    assert_eq!(s.snapshot().steps, 0);

    let pushes = s.submit_action(Action::Right).unwrap();
    assert_eq!(pushes.len(), 1);
    assert_eq!(pushes[0].seq, Some(2));
    let ServerMessage::StateUpdate(snap) = &pushes[0].message else { panic!() };
    assert_eq!(snap.cell, p(1, 0));
    assert_eq!(snap.steps, 1);
    assert_eq!(s.agent().partner_history().entries(), &[(p(0, 0), Action::Right)]);
}

#[test]
fn agent_that_starts_blocked_switches_with_an_intent() {
    let (mut s, _) = Session::create(setup(walled_agent_pair(), PlayerId::E, AgentKind::IntentMcts)).unwrap();
    assert_eq!(s.phase(), Phase::AgentTurn);
    let err = s.submit_action(Action::Right).unwrap_err();
    assert_eq!(err.code, ErrorCode::NotYourTurn);

    let pushes = s.run_agent().unwrap();
    let ServerMessage::AgentMoved(m) = &pushes[0].message else { panic!("{pushes:?}") };
    assert_eq!(m.action, Action::Switch);
    assert_eq!(m.controller, PlayerId::H);
    let ServerMessage::IntentReceived { cells } = &pushes[1].message else { panic!() };
    assert_eq!(cells.last(), Some(&p(2, 2)));
    assert!(p(0, 0).is_adjacent(cells[0]));
    assert_eq!(s.phase(), Phase::HumanTurn);
    assert_eq!(&s.snapshot().agent_intent, cells);
}

#[test]
fn switch_hands_over_and_agent_returns_control() {
    let mut s = human_first();
    let mut pushes = s.handle(ClientMessage::HumanAction { action: Action::Switch });
    let ServerMessage::StateUpdate(snap) = &pushes.remove(0).message else { panic!() };
    assert_eq!(snap.controller, PlayerId::E);
    assert_eq!(snap.phase, Phase::AgentTurn);
    // A walled-in agent can only hand control straight back.
    assert!(matches!(&pushes[0].message, ServerMessage::AgentMoved(m) if m.action == Action::Switch));
    assert!(matches!(pushes[1].message, ServerMessage::IntentReceived { .. }));
    assert_eq!(s.phase(), Phase::HumanTurn);
    assert_eq!(s.snapshot().switches, 2);
    assert_eq!(s.snapshot().steps, 2);
}

#[test]
fn intents_are_validated_and_delivered() {
    let mut s = human_first();
    let gap = s.submit_intent(vec![p(0, 1), p(2, 1)]).unwrap_err();
    assert_eq!(gap.code, ErrorCode::InvalidIntent);
    let off = s.submit_intent(vec![p(2, 0), p(3, 0)]).unwrap_err();
    assert_eq!(off.code, ErrorCode::InvalidIntent);

    let sent = vec![p(1, 0), p(2, 0), p(2, 1), p(2, 2)];
    let ack = s.submit_intent(sent.clone()).unwrap();
    let ServerMessage::StateUpdate(snap) = &ack[0].message else { panic!() };
    assert_eq!(snap.human_intent, sent);

    s.handle(ClientMessage::HumanAction { action: Action::Switch });
    let got = s.agent().received_intent().cells();
    assert!(!got.is_empty() && sent.ends_with(got), "{got:?}");
    // Control came back, so the next turn starts without an intent.
    assert!(s.snapshot().human_intent.is_empty());

    s.submit_intent(sent).unwrap();
    s.submit_intent(vec![]).unwrap();
    assert!(s.snapshot().human_intent.is_empty());
}

#[test]
fn belief_tracks_human_moves() {
    let mut s = human_first();
    let fresh = s.belief();
    assert!(fresh.values().all(|e| e.mean == 0.5));
    s.submit_action(Action::Right).unwrap();
    s.handle(ClientMessage::HumanAction { action: Action::Switch });
    let after = s.belief();
    assert!(after["0,0,R"].mean > 0.5);
    assert!(after["0,0,U"].mean < 0.5);
    assert_eq!(s.belief(), after);
    let pushes = s.handle(ClientMessage::BeliefRequest);
    let ServerMessage::BeliefSnapshot { belief } = &pushes[0].message else { panic!() };
    assert_eq!(belief, &after);
}

#[test]
fn finished_games_reject_actions() {
    let mut h = MazeSide::open(3, 1);
    h.set_passable(p(0, 0), Action::Right, true);
    let pair = MazePair::new(MazeSide::closed(3, 1), h).unwrap();
    let mut setup = setup(pair, PlayerId::H, AgentKind::Heuristic);
    setup.config.goal = p(2, 0);
    let (mut s, _) = Session::create(setup).unwrap();
    s.submit_action(Action::Right).unwrap();
    let last = s.submit_action(Action::Right).unwrap();
    let ServerMessage::Finished(snap) = &last.last().unwrap().message else { panic!() };
    assert!(snap.success);
    assert_eq!(snap.steps, 2);
    assert_eq!(s.phase(), Phase::Finished);
    assert_eq!(s.submit_action(Action::Left).unwrap_err().code, ErrorCode::Finished);
    assert_eq!(s.submit_intent(vec![]).unwrap_err().code, ErrorCode::Finished);
    let pushes = s.handle(ClientMessage::HumanAction { action: Action::Left });
    assert_eq!(error_code(&pushes), Some(ErrorCode::Finished));
}

#[test]
fn step_cap_ends_the_game() {
    let mut setup = setup(walled_agent_pair(), PlayerId::H, AgentKind::Heuristic);
    setup.cap = 3;
    let (mut s, _) = Session::create(setup).unwrap();
    s.submit_action(Action::Right).unwrap();
    s.submit_action(Action::Left).unwrap();
    let last = s.submit_action(Action::Right).unwrap();
    let ServerMessage::Finished(snap) = &last.last().unwrap().message else { panic!() };
    assert!(!snap.success);
    assert_eq!(snap.steps, 3);
}

#[test]
fn invalid_setups_are_rejected() {
    let mut bad = setup(walled_agent_pair(), PlayerId::H, AgentKind::Heuristic);
    bad.config.goal = p(0, 0);
    assert_eq!(Session::create(bad).err().unwrap().code, ErrorCode::InvalidConfig);
    let mut bad = setup(walled_agent_pair(), PlayerId::H, AgentKind::Heuristic);
    bad.config.goal = p(5, 5);
    assert_eq!(Session::create(bad).err().unwrap().code, ErrorCode::InvalidConfig);
}

/// The session driven by a scripted human reproduces the agent's moves from
/// a harness episode with the same seed.
#[test]
fn session_matches_harness_episode() {
    for seed in 0..6u64 {
        let pair = generate_maze_pair(seed, 5, 5, 0.45).unwrap();
        let config = GameConfig {
            init: p(0, 0),
            goal: p(4, 3),
            initial_controller: if seed % 2 == 0 { PlayerId::E } else { PlayerId::H },
        };
        let spec = PairSpec {
            agent_e: AgentKind::IntentMcts,
            agent_h: AgentKind::Heuristic,
            params: AgentParams::default(),
        };
        let mut seats = spec.seats(&pair, seed).unwrap();
        let outcome = play_episode(&pair, &config, &mut seats, 400).unwrap();

        let (mut s, _) = Session::create(SessionSetup {
            id: format!("eq{seed}"),
            maze_id: None,
            pair: pair.clone(),
            config,
            human_side: PlayerId::H,
            agent_kind: AgentKind::IntentMcts,
            params: AgentParams::default(),
            seed,
            cap: 400,
        })
        .unwrap();
        let mut agent_moves = Vec::new();
        let collect = |pushes: Vec<coordplan_service::Envelope<ServerMessage>>, out: &mut Vec<(GridPos, Action)>| {
            for push in pushes {
                if let ServerMessage::AgentMoved(m) = push.message {
                    out.push((m.from, m.action));
                }
            }
        };
        collect(s.run_agent().unwrap(), &mut agent_moves);
        for ev in outcome.trace.iter().filter(|e| e.player == PlayerId::H) {
            if ev.action == Action::Switch {
                let cells = ev.intent.clone().unwrap_or_default().cells().to_vec();
                s.submit_intent(cells).unwrap();
            }
            collect(s.submit_action(ev.action).unwrap(), &mut agent_moves);
            collect(s.run_agent().unwrap(), &mut agent_moves);
        }
        let expected: Vec<_> = outcome
            .trace
            .iter()
            .filter(|e| e.player == PlayerId::E)
            .map(|e| (e.cell, e.action))
            .collect();
        assert_eq!(agent_moves, expected, "seed {seed}");
        let snap = s.snapshot();
        assert_eq!((snap.steps, snap.switches, snap.success), (outcome.steps, outcome.switches, outcome.success));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Folding the push stream on the client reproduces the server state,
    /// and seq increases by exactly one per push.
    #[test]
    fn replaying_pushes_rebuilds_the_snapshot(
        seed in any::<u64>(),
        script in prop::collection::vec((0..6usize, any::<bool>()), 1..60),
        start_h in any::<bool>(),
    ) {
        let pair = generate_maze_pair(seed, 4, 4, 0.45).unwrap();
        let (mut s, mut log) = Session::create(SessionSetup {
            id: "r".into(),
            maze_id: Some("gen".into()),
            pair: pair.clone(),
            config: GameConfig {
                init: p(0, 0),
                goal: p(3, 3),
                initial_controller: if start_h { PlayerId::H } else { PlayerId::E },
            },
            human_side: PlayerId::H,
            agent_kind: AgentKind::IntentMcts,
            params: AgentParams { planner: coordplan_core::PlannerParams { iterations: 20, ..Default::default() }, ..Default::default() },
            seed,
            cap: 80,
        }).unwrap();
        log.extend(s.run_agent().unwrap());
        for (pick, with_intent) in script {
            let cell = s.snapshot().cell;
            if with_intent {
                let next = pair.grid().neighbor(cell, Action::MOVES[pick % 4]);
                log.extend(s.handle(ClientMessage::HumanIntent { cells: next.into_iter().collect() }));
            }
            let action = if pick < 4 { Action::MOVES[pick] } else { Action::Switch };
            log.extend(s.handle(ClientMessage::HumanAction { action }));
            if pick == 5 {
                log.extend(s.handle(ClientMessage::BeliefRequest));
            }
        }
        let mut view = ClientView::default();
        for (i, push) in log.iter().enumerate() {
            prop_assert_eq!(push.seq, Some(i as u64 + 1));
            view.apply(push).unwrap();
        }
        prop_assert_eq!(view.snapshot.unwrap(), s.snapshot());
        let snap = s.snapshot();
        prop_assert!(snap.switches <= snap.steps && snap.steps <= 80);
    }
}
