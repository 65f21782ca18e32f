#include "woc/simulation.hpp"

#include <algorithm>
#include <cmath>

namespace woc {

Simulation::Simulation(SimParams params)
    : params_(std::move(params)), rng_(params_.seed)
{
    const int n = params_.n_replicas;
    if (n < 3)
        throw ConfigError("simulation needs at least 3 replicas");
    if (params_.links.replica_delay_ms.size() != static_cast<std::size_t>(n))
        throw ConfigError("latency profile does not match replica count");
    if (params_.client_count < 1)
        throw ConfigError("need at least one client");
    if (params_.duration_ms <= 0.0 && params_.op_budget == 0)
        throw ConfigError("either duration_ms or op_budget must be set");

    om_ = std::make_unique<ObjectManager>(n, params_.weight_policy, params_.classifier);

    // Leader: highest node weight at configuration time, i.e. rank 0 of the
    // id-ordered initial vector.
    leader_ = om_->node_weights().rank_to_replica.front();

    replicas_.resize(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) {
        replicas_[static_cast<std::size_t>(r)].id = r;
        replicas_[static_cast<std::size_t>(r)].fast.set_self(r);
    }
    replica(leader_).slow = std::make_unique<SlowLeader>(leader_);

    const double p99 = params_.links.p99_one_way();
    fast_timeout_ = params_.fast_timeout_mult * p99;
    slow_timeout_ = params_.slow_timeout_mult * p99;

    // Workload-declared classes: shared pools are pinned unless the scenario
    // runs adaptive classification. Per-client independent objects stay
    // unpinned; an empty history classifies as Independent anyway.
    if (!params_.adaptive_classes) {
        for (std::uint64_t o = 0; o < params_.hot_pool; ++o)
            om_->pin_class(o, ObjectClass::Hot);
        if (params_.conflict_fraction < 0.0)
            for (std::uint64_t o = 0; o < params_.common_pool; ++o)
                om_->pin_class(params_.hot_pool + o, ObjectClass::Common);
    }

    clients_.resize(static_cast<std::size_t>(params_.client_count));
    for (int c = 0; c < params_.client_count; ++c) {
        clients_[static_cast<std::size_t>(c)].id = c;
        clients_[static_cast<std::size_t>(c)].rotation = c % n;
        SimEvent tick;
        tick.kind = EventKind::ClientTick;
        tick.client = c;
        queue_.schedule(params_.request_interval_ms * c / params_.client_count, std::move(tick));
    }

    for (const CrashEntry& entry : params_.crashes) {
        if (entry.replica < 0 || entry.replica >= n)
            throw ConfigError("crash schedule names unknown replica");
        SimEvent ev;
        ev.kind = entry.recover ? EventKind::Recover : EventKind::Crash;
        ev.replica = entry.replica;
        queue_.schedule(entry.time_ms, std::move(ev));
    }

    trace_.protocol = to_string(params_.mode);
    trace_.n = n;
    trace_.t = params_.t;
    trace_.seed = params_.seed;
    trace_.initial_node_weights = om_->node_weights();
}

void Simulation::run()
{
    protocol_check(!ran_, "Simulation::run called twice");
    ran_ = true;

    while (!queue_.empty()) {
        SimEvent ev = queue_.pop();
        protocol_check(ev.time + 1e-9 >= now_, "event queue went backwards");
        now_ = ev.time;
        if (++events_processed_ > params_.event_budget)
            throw std::runtime_error("event budget exceeded: likely event-loop livelock at t=" +
                                     std::to_string(now_));
        handle(ev);
    }
    trace_.commits = om_->ledger();
}

void Simulation::handle(const SimEvent& ev)
{
    switch (ev.kind) {
    case EventKind::ClientTick: handle_client_tick(ev.client); break;
    case EventKind::ClientArrival: handle_client_arrival(ev); break;
    case EventKind::ClientRetry: handle_client_retry(ev); break;
    case EventKind::ClientReply: handle_client_reply(ev); break;
    case EventKind::Deliver: handle_deliver(ev); break;
    case EventKind::SlowHandoff: handle_slow_handoff(ev); break;
    case EventKind::FastTimeout: handle_fast_timeout(ev); break;
    case EventKind::SlowTimeout: handle_slow_timeout(ev); break;
    case EventKind::Crash: handle_crash(ev.replica, ev.time); break;
    case EventKind::Recover: handle_recover(ev.replica, ev.time); break;
    }
}

// ---- clients ----

bool Simulation::issuing_open(double when) const
{
    if (params_.op_budget > 0)
        return ops_generated_ < params_.op_budget;
    return when < params_.duration_ms;
}

void Simulation::handle_client_tick(ClientId c)
{
    Client& client = clients_[static_cast<std::size_t>(c)];
    if (!client.generating)
        return;
    if (!issuing_open(now_)) {
        client.generating = false;
        return;
    }
    std::uint64_t size = params_.batch_size;
    if (params_.op_budget > 0)
        size = std::min<std::uint64_t>(size, params_.op_budget - ops_generated_);
    if (size > 0) {
        ops_generated_ += size;
        client.backlog += size;  // backlog counted in ops; requests formed at dispatch
        try_dispatch(client, now_);
    }
    SimEvent tick;
    tick.kind = EventKind::ClientTick;
    tick.client = c;
    queue_.schedule(now_ + params_.request_interval_ms, std::move(tick));
}

ObjectId Simulation::draw_object(Client& c)
{
    const std::uint64_t hot = params_.hot_pool;
    const std::uint64_t common = params_.common_pool;
    const std::uint64_t per_client = std::max<std::uint64_t>(
        1, params_.independent_pool / static_cast<std::uint64_t>(params_.client_count));
    const std::uint64_t indep_base =
        hot + common + static_cast<std::uint64_t>(c.id) * per_client;

    const double u = rng_.uniform();
    if (params_.conflict_fraction >= 0.0) {
        if (u < params_.conflict_fraction)
            return rng_.below(hot);
        return indep_base + rng_.below(per_client);
    }
    if (u < params_.mix_hot)
        return rng_.below(hot);
    if (u < params_.mix_hot + params_.mix_common)
        return hot + rng_.below(common);
    return indep_base + rng_.below(per_client);
}

Operation Simulation::make_operation(Client& c, double when)
{
    Operation op;
    op.id = OpId{c.id, c.next_seq++};
    op.object = draw_object(c);
    op.kind = (params_.read_fraction > 0.0 && rng_.uniform() < params_.read_fraction)
                  ? OpKind::Read
                  : OpKind::Write;
    op.payload_bytes = params_.payload_bytes;
    op.submit_ms = when;
    return op;
}

ReplicaId Simulation::pick_target(Client& c) const
{
    if (params_.mode == ProtocolMode::Cabinet)
        return leader_;
    const int n = params_.n_replicas;
    for (int step = 0; step < n; ++step) {
        const ReplicaId r = (c.rotation + step) % n;
        if (replicas_[static_cast<std::size_t>(r)].alive) {
            const_cast<Client&>(c).rotation = (r + 1) % n;
            return r;
        }
    }
    return leader_;  // nobody alive; the request will be lost and retried
}

void Simulation::try_dispatch(Client& c, double when)
{
    while (c.backlog > 0 && c.inflight.size() < static_cast<std::size_t>(params_.max_inflight)) {
        const std::uint64_t size = std::min<std::uint64_t>(c.backlog, params_.batch_size);
        c.backlog -= size;

        Request req;
        req.id = c.next_request_id++;
        req.dispatched_ms = when;
        for (std::uint64_t i = 0; i < size; ++i) {
            Operation op = make_operation(c, when);
            op.coordinator = -1;
            req.open.insert(op.id);
            req.ops.push_back(op);
            trace_.submits.push_back(SubmitEntry{op.id, op.object, op.kind, c.id, when});
        }
        const ReplicaId target = pick_target(c);

        SimEvent arrival;
        arrival.kind = EventKind::ClientArrival;
        arrival.to = target;
        arrival.client = c.id;
        arrival.request_id = req.id;
        arrival.request_ops = req.ops;
        queue_.schedule(when + params_.links.client_link(target, rng_), std::move(arrival));

        SimEvent retry;
        retry.kind = EventKind::ClientRetry;
        retry.client = c.id;
        retry.request_id = req.id;
        queue_.schedule(when + params_.client_retry_ms, std::move(retry));

        c.inflight.emplace(req.id, std::move(req));
    }
}

void Simulation::handle_client_arrival(const SimEvent& ev)
{
    Replica& at = replica(ev.to);
    if (!at.alive)
        return;  // lost; the client retry timer resubmits elsewhere
    const double when =
        advance_busy(at, ev.time, params_.links.proc_ingest_ms * static_cast<double>(ev.request_ops.size()));
    for (const Operation& op : ev.request_ops) {
        Operation local = op;
        local.coordinator = at.id;
        route_operation(at, local, when);
    }
}

void Simulation::handle_client_retry(const SimEvent& ev)
{
    Client& c = clients_[static_cast<std::size_t>(ev.client)];
    auto it = c.inflight.find(ev.request_id);
    if (it == c.inflight.end())
        return;
    Request& req = it->second;

    if (++req.retries > params_.client_retry_limit) {
        for (const OpId& id : req.open)
            if (!om_->committed(id))
                note_failure(id, ev.time, "client retry limit");
        c.inflight.erase(it);
        try_dispatch(c, ev.time);
        return;
    }

    std::vector<Operation> remaining;
    for (const Operation& op : req.ops)
        if (req.open.count(op.id) && !om_->committed(op.id))
            remaining.push_back(op);

    if (!remaining.empty()) {
        const ReplicaId target = pick_target(c);
        SimEvent arrival;
        arrival.kind = EventKind::ClientArrival;
        arrival.to = target;
        arrival.client = c.id;
        arrival.request_id = req.id;
        arrival.request_ops = std::move(remaining);
        queue_.schedule(ev.time + params_.links.client_link(target, rng_), std::move(arrival));
    }
    SimEvent retry;
    retry.kind = EventKind::ClientRetry;
    retry.client = c.id;
    retry.request_id = req.id;
    queue_.schedule(ev.time + params_.client_retry_ms, std::move(retry));
}

void Simulation::handle_client_reply(const SimEvent& ev)
{
    Client& c = clients_[static_cast<std::size_t>(ev.client)];
    for (auto it = c.inflight.begin(); it != c.inflight.end(); ++it) {
        if (it->second.open.erase(ev.op_ref) > 0) {
            if (it->second.done()) {
                c.inflight.erase(it);
                try_dispatch(c, ev.time);
            }
            return;
        }
    }
}

// ---- routing ----

void Simulation::route_operation(Replica& at, Operation op, double when)
{
    if (om_->committed(op.id) || om_->op_inflight(op))
        return;  // duplicate delivery of work already in progress

    const bool saw_conflict = om_->has_conflicting_inflight(op.object, op.kind);
    om_->note_op(op.object, op.id.client, saw_conflict, when);

    const Path path =
        params_.mode == ProtocolMode::Cabinet ? baseline_route(op) : om_->route(op);
    if (path == Path::Fast)
        start_fast(at, op, when);
    else
        submit_slow(at, op, when);
}

// ---- fast path ----

void Simulation::start_fast(Replica& at, const Operation& op, double when)
{
    om_->register_inflight(op, Path::Fast);
    at.inflight[op.object][op.id] = op.kind;

    FastAttempt& attempt =
        at.fast.start(op, om_->object_weights(op.object), when, when + fast_timeout_);

    AttemptSpan span;
    span.path = Path::Fast;
    span.object = op.object;
    span.op = op.id;
    span.kind = op.kind;
    span.start_ms = when;
    span.coordinator = at.id;
    open_fast_spans_.emplace(op.id, span);
    fast_rtt_.emplace(op.id, RttProbe{when, params_.n_replicas - 1});

    ProtocolMessage propose;
    propose.kind = MsgKind::FastPropose;
    propose.ops = {op};
    broadcast(at.id, propose, when);

    SimEvent timeout;
    timeout.kind = EventKind::FastTimeout;
    timeout.to = at.id;
    timeout.op_ref = op.id;
    queue_.schedule(attempt.deadline_ms, std::move(timeout));

    if (attempt.accumulated >= attempt.threshold) {
        // degenerate configuration where one replica alone forms a quorum
        attempt.state = FastState::Committed;
        do_fast_commit(at, op.id, when);
    }
}

void Simulation::handle_fast_propose(Replica& at, const ProtocolMessage& msg, double when)
{
    const Operation& op = msg.op();
    MsgKind verdict;
    auto seen = at.fast_verdicts.find(op.id);
    if (seen != at.fast_verdicts.end()) {
        verdict = seen->second;  // answer duplicates with the original verdict
    } else {
        bool conflict = false;
        auto obj_it = at.inflight.find(op.object);
        if (obj_it != at.inflight.end())
            for (const auto& [other, kind] : obj_it->second)
                if (other != op.id && conflicts(kind, op.kind)) {
                    conflict = true;
                    break;
                }
        verdict = conflict ? MsgKind::Conflict : MsgKind::FastAccept;
        at.fast_verdicts.emplace(op.id, verdict);
        if (verdict == MsgKind::FastAccept)
            at.inflight[op.object][op.id] = op.kind;
    }

    ProtocolMessage reply;
    reply.kind = verdict;
    reply.ops = {op};
    send_message(at.id, msg.sender, std::move(reply), when);
}

void Simulation::note_fast_response(const OpId& id, ReplicaId responder, ObjectId object, double when)
{
    auto it = fast_rtt_.find(id);
    if (it == fast_rtt_.end())
        return;
    const double latency = when - it->second.start_ms;
    if (latency > 0.0)
        om_->record_response(responder, object, latency);
    if (--it->second.remaining <= 0)
        fast_rtt_.erase(it);
}

void Simulation::handle_fast_accept(Replica& at, const ProtocolMessage& msg, double when)
{
    const Operation& op = msg.op();
    note_fast_response(op.id, msg.sender, op.object, when);

    switch (at.fast.on_accept(op.id, msg.sender)) {
    case FastCoordinator::AcceptResult::Committed:
        do_fast_commit(at, op.id, when);
        break;
    case FastCoordinator::AcceptResult::Counting:
    case FastCoordinator::AcceptResult::Duplicate:
    case FastCoordinator::AcceptResult::Stale:
        break;  // late accepts after commit or fallback are ignored
    }
}

void Simulation::handle_conflict(Replica& at, const ProtocolMessage& msg, double when)
{
    const Operation& op = msg.op();
    note_fast_response(op.id, msg.sender, op.object, when);
    fast_fallback(at, op.id, when, "conflict reply");
}

void Simulation::do_fast_commit(Replica& at, const OpId& id, double when)
{
    FastAttempt* attempt = at.fast.find(id);
    protocol_check(attempt && attempt->state == FastState::Committed,
                   "fast commit without a committed attempt");
    const Operation op = attempt->op;

    CommitRecord rec;
    rec.op = op.id;
    rec.object = op.object;
    rec.kind = op.kind;
    rec.path = Path::Fast;
    rec.quorum_members = attempt->quorum(at.id);
    rec.accumulated_weight = attempt->accumulated;
    rec.threshold_used = attempt->threshold;
    rec.commit_ms = when;
    const std::uint64_t index = om_->append_commit(rec);
    om_->clear_inflight(op);

    auto span = open_fast_spans_.find(id);
    protocol_check(span != open_fast_spans_.end(), "fast commit without an open span");
    span->second.end_ms = when;
    span->second.committed = true;
    trace_.attempts.push_back(span->second);
    open_fast_spans_.erase(span);

    ProtocolMessage commit;
    commit.kind = MsgKind::FastCommit;
    commit.ops = {op};
    commit.quorum = rec.quorum_members;
    commit.commit_indexes = {index};
    broadcast(at.id, commit, when);

    apply_commit(at, op, index, when);
    reply_client(op.id.client, op.id, false, at.id, when);
    at.fast.erase(id);

    // a slow op deferred behind this object may be eligible now
    try_slow_propose(when);
}

void Simulation::fast_fallback(Replica& at, const OpId& id, double when, const char* reason)
{
    if (at.fast.on_conflict_or_timeout(id) == FastCoordinator::AbortResult::Ignored)
        return;
    FastAttempt* attempt = at.fast.find(id);
    const Operation op = attempt->op;
    (void)reason;

    om_->clear_inflight(op);
    auto obj_it = at.inflight.find(op.object);
    if (obj_it != at.inflight.end())
        obj_it->second.erase(op.id);

    auto span = open_fast_spans_.find(id);
    protocol_check(span != open_fast_spans_.end(), "fallback without an open span");
    span->second.end_ms = when;
    span->second.committed = false;
    trace_.attempts.push_back(span->second);
    open_fast_spans_.erase(span);
    at.fast.erase(id);

    // resubmitted to the slow path exactly once, carrying the original id
    submit_slow(at, op, when);
    try_slow_propose(when);
}

void Simulation::handle_fast_timeout(const SimEvent& ev)
{
    Replica& at = replica(ev.to);
    if (!at.alive)
        return;
    fast_fallback(at, ev.op_ref, ev.time, "timeout");
}

void Simulation::handle_fast_commit(Replica& at, const ProtocolMessage& msg, double when)
{
    apply_commit(at, msg.op(), msg.commit_indexes.front(), when);
}

// ---- slow path ----

void Simulation::submit_slow(Replica& from, const Operation& op, double when)
{
    if (from.id == leader_) {
        Replica& L = from;
        if (!L.alive || om_->committed(op.id))
            return;
        if (L.slow->enqueue(op)) {
            om_->register_inflight(op, Path::Slow);
            try_slow_propose(when);
        }
        return;
    }
    SimEvent handoff;
    handoff.kind = EventKind::SlowHandoff;
    handoff.to = leader_;
    handoff.handoff_op = op;
    queue_.schedule(when + params_.links.replica_link(from.id, leader_, rng_), std::move(handoff));
}

void Simulation::handle_slow_handoff(const SimEvent& ev)
{
    Replica& L = replica(ev.to);
    if (!L.alive)
        return;
    const double when = advance_busy(L, ev.time, params_.links.proc_ingest_ms);
    if (om_->committed(ev.handoff_op.id) || om_->op_inflight(ev.handoff_op))
        return;
    if (L.slow->enqueue(ev.handoff_op)) {
        om_->register_inflight(ev.handoff_op, Path::Slow);
        try_slow_propose(when);
    }
}

void Simulation::try_slow_propose(double when)
{
    Replica& L = replica(leader_);
    if (!L.alive || !L.slow || L.slow->guard_held())
        return;

    const bool conflict_aware = params_.mode == ProtocolMode::Woc;
    auto blocked = [&](const Operation& op) {
        return conflict_aware && om_->has_fast_inflight(op.object);
    };
    auto drop = [&](const Operation& op) {
        if (!om_->committed(op.id))
            return false;
        return true;
    };
    std::vector<Operation> batch = L.slow->select_batch(
        static_cast<std::size_t>(params_.batch_size), conflict_aware, blocked, drop);
    if (batch.empty())
        return;

    for (const Operation& op : batch) {
        if (conflict_aware)
            protocol_check(!om_->has_fast_inflight(op.object),
                           "slow proposal while a fast attempt is active on the object");
        L.inflight[op.object][op.id] = op.kind;
    }

    SlowAttempt& attempt =
        L.slow->begin(std::move(batch), om_->node_weights(), when, when + slow_timeout_);
    slow_round_start_[attempt.round] = when;
    slow_responder_latency_.clear();

    for (int r = 0; r < params_.n_replicas; ++r) {
        if (r == leader_)
            continue;
        ProtocolMessage propose;
        propose.kind = MsgKind::SlowPropose;
        propose.ops = attempt.ops;
        propose.round = attempt.round;
        propose.priority = attempt.priorities.weight_of(r);
        send_message(leader_, r, std::move(propose), when);
    }

    SimEvent timeout;
    timeout.kind = EventKind::SlowTimeout;
    timeout.to = leader_;
    timeout.round = attempt.round;
    queue_.schedule(attempt.deadline_ms, std::move(timeout));

    if (attempt.priority_sum >= attempt.threshold) {
        attempt.state = SlowState::Committed;
        do_slow_commit(L, when);
    }
}

void Simulation::handle_slow_propose(Replica& at, const ProtocolMessage& msg, double when)
{
    for (const Operation& op : msg.ops)
        at.inflight[op.object][op.id] = op.kind;

    ProtocolMessage accept;
    accept.kind = MsgKind::SlowAccept;
    accept.ops = msg.ops;
    accept.round = msg.round;
    accept.priority = msg.priority;  // echo of the leader's snapshot entry
    send_message(at.id, msg.sender, std::move(accept), when);
}

void Simulation::handle_slow_accept(Replica& at, const ProtocolMessage& msg, double when)
{
    if (!at.slow)
        return;
    auto start = slow_round_start_.find(msg.round);
    if (start != slow_round_start_.end()) {
        const double latency = when - start->second;
        if (latency > 0.0) {
            const bool current = at.slow->attempt() && at.slow->attempt()->round == msg.round &&
                                 at.slow->attempt()->state == SlowState::Collecting;
            if (current)
                slow_responder_latency_[msg.sender] = latency;  // fed at commit
            else
                om_->record_node_response(msg.sender, latency);  // late response
        }
    }

    switch (at.slow->on_accept(msg.round, msg.sender)) {
    case SlowLeader::AcceptResult::Committed:
        do_slow_commit(at, when);
        break;
    case SlowLeader::AcceptResult::Counting:
    case SlowLeader::AcceptResult::Duplicate:
    case SlowLeader::AcceptResult::Stale:
        break;
    }
}

void Simulation::do_slow_commit(Replica& L, double when)
{
    SlowAttempt& attempt = *L.slow->attempt();
    const std::vector<ReplicaId> quorum = attempt.quorum(leader_);

    ProtocolMessage commit;
    commit.kind = MsgKind::SlowCommit;
    commit.quorum = quorum;
    commit.round = attempt.round;

    for (const Operation& op : attempt.ops) {
        CommitRecord rec;
        rec.op = op.id;
        rec.object = op.object;
        rec.kind = op.kind;
        rec.path = Path::Slow;
        rec.quorum_members = quorum;
        rec.accumulated_weight = attempt.priority_sum;
        rec.threshold_used = attempt.threshold;
        rec.commit_ms = when;
        const std::uint64_t index = om_->append_commit(rec);
        om_->clear_inflight(op);

        AttemptSpan span;
        span.path = Path::Slow;
        span.object = op.object;
        span.op = op.id;
        span.kind = op.kind;
        span.start_ms = attempt.start_ms;
        span.end_ms = when;
        span.committed = true;
        span.coordinator = leader_;
        trace_.attempts.push_back(span);

        commit.ops.push_back(op);
        commit.commit_indexes.push_back(index);
    }

    om_->update_node_priorities(slow_responder_latency_);
    slow_responder_latency_.clear();

    broadcast(leader_, commit, when);
    for (std::size_t i = 0; i < commit.ops.size(); ++i) {
        apply_commit(L, commit.ops[i], commit.commit_indexes[i], when);
        reply_client(commit.ops[i].id.client, commit.ops[i].id, false, leader_, when);
    }

    L.slow->finish_commit();
    try_slow_propose(when);
}

void Simulation::handle_slow_commit(Replica& at, const ProtocolMessage& msg, double when)
{
    for (std::size_t i = 0; i < msg.ops.size(); ++i)
        apply_commit(at, msg.ops[i], msg.commit_indexes[i], when);
}

void Simulation::handle_slow_timeout(const SimEvent& ev)
{
    Replica& L = replica(ev.to);
    if (!L.alive)
        return;
    SlowAttempt* attempt = L.slow->attempt() ? &*L.slow->attempt() : nullptr;
    const double start = attempt ? attempt->start_ms : 0.0;

    auto outcome = L.slow->on_timeout(ev.round, params_.slow_retry_limit);
    if (!outcome)
        return;

    // keep the latency observations of the expired round
    for (const auto& [responder, latency] : slow_responder_latency_)
        om_->record_node_response(responder, latency);
    slow_responder_latency_.clear();

    auto emit_span = [&](const Operation& op) {
        AttemptSpan span;
        span.path = Path::Slow;
        span.object = op.object;
        span.op = op.id;
        span.kind = op.kind;
        span.start_ms = start;
        span.end_ms = ev.time;
        span.committed = false;
        span.coordinator = leader_;
        trace_.attempts.push_back(span);
    };
    for (const Operation& op : outcome->requeued)
        emit_span(op);
    for (const Operation& op : outcome->failed) {
        emit_span(op);
        om_->clear_inflight(op);
        auto obj_it = L.inflight.find(op.object);
        if (obj_it != L.inflight.end())
            obj_it->second.erase(op.id);
        note_failure(op.id, ev.time, "slow retry limit");
        reply_client(op.id.client, op.id, true, leader_, ev.time);
    }
    try_slow_propose(ev.time);
}

// ---- application ----

void Simulation::apply_commit(Replica& at, const Operation& op, std::uint64_t index, double when)
{
    auto obj_it = at.inflight.find(op.object);
    if (obj_it != at.inflight.end())
        obj_it->second.erase(op.id);
    at.fast_verdicts.erase(op.id);

    std::uint64_t& next = at.next_apply.try_emplace(op.object, 1).first->second;
    if (index < next)
        return;  // duplicate commit delivery
    auto& pending = at.holdback[op.object];
    pending.emplace(index, op);
    while (!pending.empty() && pending.begin()->first == next) {
        const Operation& ready = pending.begin()->second;
        trace_.applies.push_back(ApplyEntry{at.id, ready.object, ready.id, next, when});
        pending.erase(pending.begin());
        next += 1;
    }
}

// ---- faults ----

void Simulation::handle_crash(ReplicaId r, double when)
{
    Replica& at = replica(r);
    protocol_check(at.alive, "crash of a replica that is already down");
    at.alive = false;
    trace_.crashes.push_back(CrashEntry{r, when, false});
}

void Simulation::handle_recover(ReplicaId r, double when)
{
    Replica& at = replica(r);
    protocol_check(!at.alive, "recover of a replica that is up");
    at.alive = true;
    at.busy_until = std::max(at.busy_until, when);
    trace_.crashes.push_back(CrashEntry{r, when, true});
}

// ---- plumbing ----

double Simulation::advance_busy(Replica& r, double arrival, double service)
{
    const double start = std::max(arrival, r.busy_until);
    r.busy_until = start + service;
    return r.busy_until;
}

void Simulation::handle_deliver(const SimEvent& ev)
{
    Replica& at = replica(ev.to);
    if (!at.alive)
        return;
    const double when = advance_busy(at, ev.time, params_.links.proc_msg_ms);
    switch (ev.msg.kind) {
    case MsgKind::FastPropose: handle_fast_propose(at, ev.msg, when); break;
    case MsgKind::FastAccept: handle_fast_accept(at, ev.msg, when); break;
    case MsgKind::Conflict: handle_conflict(at, ev.msg, when); break;
    case MsgKind::FastCommit: handle_fast_commit(at, ev.msg, when); break;
    case MsgKind::SlowPropose: handle_slow_propose(at, ev.msg, when); break;
    case MsgKind::SlowAccept: handle_slow_accept(at, ev.msg, when); break;
    case MsgKind::SlowCommit: handle_slow_commit(at, ev.msg, when); break;
    }
}

void Simulation::send_message(ReplicaId from, ReplicaId to, ProtocolMessage msg, double when)
{
    msg.sender = from;
    SimEvent ev;
    ev.kind = EventKind::Deliver;
    ev.to = to;
    ev.msg = std::move(msg);
    queue_.schedule(when + params_.links.replica_link(from, to, rng_), std::move(ev));
}

void Simulation::broadcast(ReplicaId from, const ProtocolMessage& msg, double when)
{
    for (int r = 0; r < params_.n_replicas; ++r)
        if (r != from)
            send_message(from, r, msg, when);
}

void Simulation::reply_client(ClientId c, const OpId& op, bool failed, ReplicaId from, double when)
{
    SimEvent ev;
    ev.kind = EventKind::ClientReply;
    ev.client = c;
    ev.op_ref = op;
    ev.failed = failed;
    queue_.schedule(when + params_.links.client_link(from, rng_), std::move(ev));
}

void Simulation::note_failure(const OpId& op, double when, const std::string& reason)
{
    if (failed_ops_.insert(op).second)
        trace_.failures.push_back(FailEntry{op, when, reason});
}

} // namespace woc
