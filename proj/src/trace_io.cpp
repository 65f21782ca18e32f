#include <fstream>
#include <sstream>

#include <json.hpp>

#include "woc/harness.hpp"

namespace woc {

namespace {

using json = nlohmann::ordered_json;

json op_json(const OpId& id)
{
    return json::array({id.client, id.seq});
}

OpId op_from(const json& j)
{
    return OpId{j.at(0).get<ClientId>(), j.at(1).get<std::uint64_t>()};
}

const char* kind_str(OpKind kind)
{
    return kind == OpKind::Read ? "r" : "w";
}

OpKind kind_from(const std::string& s)
{
    return s == "r" ? OpKind::Read : OpKind::Write;
}

const char* path_str(Path path)
{
    return path == Path::Fast ? "fast" : "slow";
}

Path path_from(const std::string& s)
{
    return s == "fast" ? Path::Fast : Path::Slow;
}

} // namespace

void write_trace(const RunTrace& trace, std::ostream& out)
{
    json meta;
    meta["kind"] = "meta";
    meta["protocol"] = trace.protocol;
    meta["n"] = trace.n;
    meta["t"] = trace.t;
    meta["seed"] = trace.seed;
    meta["node_weights"] = trace.initial_node_weights.weights;
    meta["node_ranks"] = trace.initial_node_weights.rank_to_replica;
    out << meta.dump() << "\n";

    for (const SubmitEntry& e : trace.submits) {
        json j;
        j["kind"] = "submit";
        j["op"] = op_json(e.op);
        j["object"] = e.object;
        j["op_kind"] = kind_str(e.kind);
        j["client"] = e.client;
        j["t"] = e.time_ms;
        out << j.dump() << "\n";
    }
    for (const AttemptSpan& e : trace.attempts) {
        json j;
        j["kind"] = "attempt";
        j["path"] = path_str(e.path);
        j["object"] = e.object;
        j["op"] = op_json(e.op);
        j["op_kind"] = kind_str(e.kind);
        j["start"] = e.start_ms;
        j["end"] = e.end_ms;
        j["committed"] = e.committed;
        j["coordinator"] = e.coordinator;
        out << j.dump() << "\n";
    }
    for (const CommitRecord& e : trace.commits) {
        json j;
        j["kind"] = "commit";
        j["op"] = op_json(e.op);
        j["object"] = e.object;
        j["op_kind"] = kind_str(e.kind);
        j["path"] = path_str(e.path);
        j["quorum"] = e.quorum_members;
        j["weight"] = e.accumulated_weight;
        j["threshold"] = e.threshold_used;
        j["t"] = e.commit_ms;
        j["index"] = e.commit_index;
        out << j.dump() << "\n";
    }
    for (const ApplyEntry& e : trace.applies) {
        json j;
        j["kind"] = "apply";
        j["replica"] = e.replica;
        j["object"] = e.object;
        j["op"] = op_json(e.op);
        j["index"] = e.commit_index;
        j["t"] = e.time_ms;
        out << j.dump() << "\n";
    }
    for (const FailEntry& e : trace.failures) {
        json j;
        j["kind"] = "fail";
        j["op"] = op_json(e.op);
        j["t"] = e.time_ms;
        j["reason"] = e.reason;
        out << j.dump() << "\n";
    }
    for (const CrashEntry& e : trace.crashes) {
        json j;
        j["kind"] = e.recover ? "recover" : "crash";
        j["replica"] = e.replica;
        j["t"] = e.time_ms;
        out << j.dump() << "\n";
    }
}

void write_trace_file(const RunTrace& trace, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot write trace file: " + path);
    write_trace(trace, out);
}

std::string trace_to_string(const RunTrace& trace)
{
    std::ostringstream out;
    write_trace(trace, out);
    return out.str();
}

RunTrace read_trace_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open trace file: " + path);

    RunTrace trace;
    std::string line;
    int line_no = 0;
    bool meta_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const std::exception& e) {
            throw ConfigError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "meta") {
            meta_seen = true;
            trace.protocol = j.at("protocol").get<std::string>();
            trace.n = j.at("n").get<int>();
            trace.t = j.at("t").get<int>();
            trace.seed = j.at("seed").get<std::uint64_t>();
            trace.initial_node_weights.weights = j.at("node_weights").get<std::vector<double>>();
            trace.initial_node_weights.rank_to_replica =
                j.at("node_ranks").get<std::vector<ReplicaId>>();
        } else if (kind == "submit") {
            trace.submits.push_back(SubmitEntry{op_from(j.at("op")),
                                                j.at("object").get<ObjectId>(),
                                                kind_from(j.at("op_kind").get<std::string>()),
                                                j.at("client").get<ClientId>(),
                                                j.at("t").get<double>()});
        } else if (kind == "attempt") {
            AttemptSpan span;
            span.path = path_from(j.at("path").get<std::string>());
            span.object = j.at("object").get<ObjectId>();
            span.op = op_from(j.at("op"));
            span.kind = kind_from(j.at("op_kind").get<std::string>());
            span.start_ms = j.at("start").get<double>();
            span.end_ms = j.at("end").get<double>();
            span.committed = j.at("committed").get<bool>();
            span.coordinator = j.at("coordinator").get<ReplicaId>();
            trace.attempts.push_back(span);
        } else if (kind == "commit") {
            CommitRecord rec;
            rec.op = op_from(j.at("op"));
            rec.object = j.at("object").get<ObjectId>();
            rec.kind = kind_from(j.at("op_kind").get<std::string>());
            rec.path = path_from(j.at("path").get<std::string>());
            rec.quorum_members = j.at("quorum").get<std::vector<ReplicaId>>();
            rec.accumulated_weight = j.at("weight").get<double>();
            rec.threshold_used = j.at("threshold").get<double>();
            rec.commit_ms = j.at("t").get<double>();
            rec.commit_index = j.at("index").get<std::uint64_t>();
            trace.commits.push_back(rec);
        } else if (kind == "apply") {
            trace.applies.push_back(ApplyEntry{j.at("replica").get<ReplicaId>(),
                                               j.at("object").get<ObjectId>(), op_from(j.at("op")),
                                               j.at("index").get<std::uint64_t>(),
                                               j.at("t").get<double>()});
        } else if (kind == "fail") {
            trace.failures.push_back(FailEntry{op_from(j.at("op")), j.at("t").get<double>(),
                                               j.at("reason").get<std::string>()});
        } else if (kind == "crash" || kind == "recover") {
            trace.crashes.push_back(CrashEntry{j.at("replica").get<ReplicaId>(),
                                               j.at("t").get<double>(), kind == "recover"});
        } else {
            throw ConfigError(path + ":" + std::to_string(line_no) + ": unknown record kind " + kind);
        }
    }
    if (!meta_seen)
        throw ConfigError(path + ": missing meta record");
    return trace;
}

} // namespace woc
