#include "capcot/cycle.hpp"

#include "capcot/errors.hpp"
#include "capcot/prompt.hpp"
#include "capcot/sfpr.hpp"
#include "capcot/textutil.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace capcot {

namespace fs = std::filesystem;

OJson to_json(const CycleConfig& cfg) {
    OJson j;
    j["rounds"] = cfg.rounds;
    j["train_queries"] = OJson::array();
    for (const auto& q : cfg.train_queries) j["train_queries"].push_back(to_json(q));
    j["taxonomy"] = OJson::array();
    for (ErrorFamily f : cfg.taxonomy) j["taxonomy"].push_back(to_string(f));
    j["sfpr_cap"] = cfg.sfpr_cap;
    j["decoding"] = to_json(cfg.decoding);
    j["seed"] = cfg.seed;
    j["model"] = cfg.model;
    return j;
}

CycleConfig cycle_config_from_json(const OJson& j) {
    CycleConfig cfg;
    cfg.rounds = j.value("rounds", 3);
    if (j.contains("train_queries"))
        for (const auto& q : j["train_queries"]) cfg.train_queries.push_back(query_from_json(q));
    if (j.contains("taxonomy")) {
        cfg.taxonomy.clear();
        for (const auto& f : j["taxonomy"])
            cfg.taxonomy.insert(error_family_from_string(f.get<std::string>()));
    }
    cfg.sfpr_cap = j.value("sfpr_cap", kDefaultGuidelineCap);
    if (j.contains("decoding")) cfg.decoding = decoding_from_json(j["decoding"]);
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.model = j.value("model", std::string("offline"));
    if (cfg.rounds < 1) throw ConfigError("rounds must be >= 1");
    if (cfg.train_queries.empty()) throw ConfigError("train_queries must be non-empty");
    return cfg;
}

std::string config_hash(const CycleConfig& cfg) {
    return text::stable_hash_hex(to_json(cfg).dump());
}

namespace {

OJson to_json(const RoundPrompts& p) {
    OJson j;
    j["solver"] = capcot::to_json(p.solver);
    j["challenger"] = capcot::to_json(p.challenger);
    j["feedback"] = capcot::to_json(p.feedback);
    return j;
}

RoundPrompts round_prompts_from_json(const OJson& j) {
    RoundPrompts p;
    p.solver = role_prompt_from_json(j.at("solver"));
    p.challenger = role_prompt_from_json(j.at("challenger"));
    p.feedback = role_prompt_from_json(j.at("feedback"));
    return p;
}

std::uint64_t round_seed(std::uint64_t seed, int round) {
    std::uint64_t h = seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(round);
    h ^= h >> 30;
    h *= 0xBF58476D1CE4E5B9ULL;
    h ^= h >> 27;
    return h;
}

void write_file_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw UnreadableFile(tmp.string());
        out << content;
    }
    fs::rename(tmp, path);
}

OJson read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw UnreadableFile(path.string());
    OJson j;
    in >> j;
    return j;
}

} // namespace

OJson to_json(const RoundRecord& r) {
    OJson j;
    j["round"] = r.round;
    j["before"] = to_json(r.before);
    j["after"] = to_json(r.after);
    j["queries"] = OJson::array();
    for (const auto& q : r.queries) {
        OJson jq;
        jq["query"] = to_json(q.query);
        jq["strategy_used"] = to_json(q.strategy_used);
        jq["solver_chain"] = to_json(q.solver_chain);
        jq["challenger_chain"] = to_json(q.challenger_chain);
        jq["bundle"] = to_json(q.bundle);
        jq["flags"] = q.flags;
        j["queries"].push_back(std::move(jq));
    }
    if (r.carry_strategy) j["carry_strategy"] = to_json(*r.carry_strategy);
    j["token_records"] = OJson::array();
    for (const auto& t : r.token_records) j["token_records"].push_back(to_json(t));
    return j;
}

RoundRecord round_record_from_json(const OJson& j) {
    RoundRecord r;
    r.round = j.at("round").get<int>();
    r.before = round_prompts_from_json(j.at("before"));
    r.after = round_prompts_from_json(j.at("after"));
    for (const auto& jq : j.at("queries")) {
        QueryRecord q;
        q.query = query_from_json(jq.at("query"));
        q.strategy_used = strategy_from_json(jq.at("strategy_used"));
        q.solver_chain = chain_from_json(jq.at("solver_chain"));
        q.challenger_chain = chain_from_json(jq.at("challenger_chain"));
        q.bundle = bundle_from_json(jq.at("bundle"));
        q.flags = jq.at("flags").get<std::vector<std::string>>();
        r.queries.push_back(std::move(q));
    }
    if (j.contains("carry_strategy")) r.carry_strategy = strategy_from_json(j["carry_strategy"]);
    for (const auto& t : j.at("token_records"))
        r.token_records.push_back(token_record_from_json(t));
    return r;
}

RoundRecord run_round(RoundPrompts& prompts, std::optional<ErrorStrategy>& carry,
                      int round, const CycleConfig& cfg, Backend& backend,
                      const std::string& run_id) {
    Rng rng(round_seed(cfg.seed, round));
    TokenLedger round_ledger;
    LedgeredBackend ledgered(backend, round_ledger);

    RoundRecord rec;
    rec.round = round;
    rec.before = prompts;

    CallContext ctx;
    ctx.model = cfg.model;
    ctx.decoding = cfg.decoding;
    ctx.run_id = run_id;
    ctx.round = round;

    FeedbackLedger fledger;
    fledger.round = round;

    for (const auto& q : cfg.train_queries) {
        QueryRecord qr;
        qr.query = q;
        qr.strategy_used = carry ? *carry : sample_error_strategy(cfg.taxonomy, rng);

        qr.solver_chain = solve(prompts.solver, q, ctx, ledgered);
        if (qr.solver_chain.status == ChainStatus::Malformed)
            qr.flags.push_back("solver-malformed");

        qr.challenger_chain =
            challenge(prompts.challenger, q, qr.strategy_used, ctx, ledgered);
        if (qr.challenger_chain.status == ChainStatus::Malformed)
            qr.flags.push_back("challenger-malformed");

        qr.bundle = critique(prompts.feedback, q, qr.solver_chain, qr.challenger_chain,
                             ctx, ledgered);
        if (qr.bundle.status == BundleStatus::Unparseable)
            qr.flags.push_back("feedback-unparseable");
        else if (qr.bundle.status == BundleStatus::Partial)
            qr.flags.push_back("feedback-partial");

        if (qr.bundle.solver_directive)
            prompts.solver = sfpr_refine(prompts.solver, {*qr.bundle.solver_directive},
                                         cfg.sfpr_cap, round);

        ErrorStrategy next;
        if (qr.bundle.next_strategy) {
            next = *qr.bundle.next_strategy;
        } else {
            next = sample_error_strategy(cfg.taxonomy, rng);
            qr.flags.push_back("strategy-fallback");
        }
        prompts.challenger =
            sfpr_refine_challenger(prompts.challenger, next, {}, cfg.sfpr_cap, round);
        carry = next;

        fledger.entries.push_back({q.id, qr.bundle});
        rec.queries.push_back(std::move(qr));
    }

    prompts.feedback = sfpr_refine_self(prompts.feedback, fledger, cfg.sfpr_cap, round);

    rec.after = prompts;
    rec.carry_strategy = carry;
    rec.token_records = round_ledger.records();
    return rec;
}

PromptLineage run_optimization(const CycleConfig& cfg, Backend& backend,
                               const std::string& lineage_dir) {
    if (cfg.rounds < 1) throw ConfigError("rounds must be >= 1");
    if (cfg.train_queries.empty()) throw ConfigError("train_queries must be non-empty");

    const std::string hash = config_hash(cfg);
    const std::string run_id = "run-" + hash;
    const fs::path dir(lineage_dir);

    PromptLineage lin;
    lin.run_id = run_id;
    lin.config = cfg;

    RoundPrompts prompts{default_solver_prompt(), default_challenger_prompt(),
                         default_feedback_prompt()};
    std::optional<ErrorStrategy> carry;
    int first_round = 1;

    if (fs::exists(dir / "manifest.json")) {
        OJson manifest = read_json_file(dir / "manifest.json");
        if (manifest.at("config_hash").get<std::string>() != hash)
            throw ResumeMismatch("stored config hash " +
                                 manifest.at("config_hash").get<std::string>() +
                                 " != " + hash);
        for (int r = 1; r <= cfg.rounds; ++r) {
            const fs::path f = dir / lineage::round_file_name(r);
            if (!fs::exists(f)) break;
            RoundRecord rec = round_record_from_json(read_json_file(f));
            prompts = rec.after;
            carry = rec.carry_strategy;
            first_round = r + 1;
            lin.rounds.push_back(std::move(rec));
        }
    } else {
        fs::create_directories(dir);
        lineage::save_manifest(lineage_dir, cfg, run_id);
    }

    for (int round = first_round; round <= cfg.rounds; ++round) {
        RoundRecord rec = run_round(prompts, carry, round, cfg, backend, run_id);
        lineage::save_round(lineage_dir, rec);
        lineage::save_final_prompt(lineage_dir, prompts.solver);
        lin.rounds.push_back(std::move(rec));
    }

    lin.final_solver = prompts.solver;
    if (first_round > cfg.rounds && !lin.rounds.empty()) {
        // fully resumed; make sure the final prompt file exists
        lineage::save_final_prompt(lineage_dir, lin.final_solver);
    }
    return lin;
}

ReasoningChain infer(const RolePrompt& p_s, const Query& q, const CallContext& ctx,
                     Backend& backend) {
    return solve(p_s, q, ctx, backend);
}

namespace lineage {

std::string round_file_name(int round) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "round_%03d.json", round);
    return buf;
}

void save_manifest(const std::string& dir, const CycleConfig& cfg,
                   const std::string& run_id) {
    OJson j;
    j["run_id"] = run_id;
    j["config_hash"] = config_hash(cfg);
    j["config"] = to_json(cfg);
    write_file_atomic(fs::path(dir) / "manifest.json", j.dump(2) + "\n");
}

void save_round(const std::string& dir, const RoundRecord& rec) {
    write_file_atomic(fs::path(dir) / round_file_name(rec.round),
                      to_json(rec).dump(2) + "\n");
}

void save_final_prompt(const std::string& dir, const RolePrompt& p_s) {
    write_file_atomic(fs::path(dir) / "final_prompt.json", to_json(p_s).dump(2) + "\n");
}

PromptLineage load(const std::string& dir) {
    const fs::path d(dir);
    if (!fs::exists(d / "manifest.json")) throw MissingLineage(dir);
    OJson manifest = read_json_file(d / "manifest.json");

    PromptLineage lin;
    lin.run_id = manifest.at("run_id").get<std::string>();
    lin.config = cycle_config_from_json(manifest.at("config"));
    for (int r = 1;; ++r) {
        const fs::path f = d / round_file_name(r);
        if (!fs::exists(f)) break;
        lin.rounds.push_back(round_record_from_json(read_json_file(f)));
    }
    if (fs::exists(d / "final_prompt.json"))
        lin.final_solver = role_prompt_from_json(read_json_file(d / "final_prompt.json"));
    else if (!lin.rounds.empty())
        lin.final_solver = lin.rounds.back().after.solver;
    return lin;
}

} // namespace lineage

} // namespace capcot
