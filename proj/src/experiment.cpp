// SPDX-License-Identifier: Apache-2.0
//
// radiv - link-level simulation of repeater-assisted DFT-s-OFDM uplinks
// Copyright (C) 2026 radiv contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "radiv/experiment.hpp"

#include "radiv/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <unistd.h>

namespace radiv
{

namespace
{

namespace pt = boost::property_tree;

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep))
        out.push_back(trim(item));
    if (!s.empty() && s.back() == sep)
        out.emplace_back();
    return out;
}

std::uint64_t to_uint(const std::string& text, const std::string& what)
{
    const std::string s = trim(text);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        throw ConfigError(what + ": expected a nonnegative integer, got '" + text + "'");
    return v;
}

int to_int(const std::string& text, const std::string& what, const char* unit = "")
{
    const std::string s = trim(text);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || v < -(1LL << 30) || v > (1LL << 30))
        throw ConfigError(what + ": expected an integer" + unit + ", got '" + text + "'");
    return static_cast<int>(v);
}

double to_double(const std::string& text, const std::string& what)
{
    const std::string s = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
        throw ConfigError(what + ": expected a number, got '" + text + "'");
    return v;
}

SnrGrid to_grid(const std::string& text, const std::string& what)
{
    const auto parts = split(text, ':');
    if (parts.size() != 3)
        throw ConfigError(what + ": expected start:step:stop, got '" + text + "'");
    return SnrGrid{to_double(parts[0], what), to_double(parts[1], what), to_double(parts[2], what)};
}

// Rejects keys a section does not define, so typos do not silently fall back to defaults.
void check_keys(const pt::ptree& section, const std::string& name, std::initializer_list<const char*> allowed)
{
    for (const auto& [key, value] : section)
    {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
            throw ConfigError("[" + name + "]: unknown key '" + key + "'");
    }
}

void read_counts(const pt::ptree& section, const std::string& name, RunCounts& counts)
{
    check_keys(section, name, {"full_frames_per_snr", "semi_channels_per_snr", "semi_interf_samples", "semi_chunk"});
    auto get = [&](const char* key, std::uint64_t& dst) {
        if (auto v = section.get_optional<std::string>(key))
            dst = to_uint(*v, name + "." + key);
    };
    get("full_frames_per_snr", counts.full_frames_per_snr);
    get("semi_channels_per_snr", counts.semi_channels_per_snr);
    get("semi_interf_samples", counts.semi_interf_samples);
    get("semi_chunk", counts.semi_chunk);
}

std::vector<RepeaterSpec> to_repeaters(const std::string& text, const std::string& what)
{
    std::vector<RepeaterSpec> out;
    if (trim(text).empty())
        return out;
    for (const auto& item : split(text, ','))
    {
        const auto f = split(item, ':');
        if (f.size() != 4)
            throw ConfigError(what + ": repeater '" + item + "' must be delay:gain:l_ur:l_rg");
        RepeaterSpec r;
        r.delay = to_int(f[0], what + " delay", " number of samples");
        r.gain = to_double(f[1], what + " gain");
        r.l_ur = to_int(f[2], what + " l_ur");
        r.l_rg = to_int(f[3], what + " l_rg");
        out.push_back(r);
    }
    return out;
}

bool valid_scenario_name(const std::string& name)
{
    return !name.empty() && std::all_of(name.begin(), name.end(), [](unsigned char ch) {
        return std::isalnum(ch) || ch == '_' || ch == '-';
    });
}

std::string fmt9(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string hex64(std::uint64_t v)
{
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

const char* fading_name(Fading f) { return f == Fading::fixed ? "fixed" : "rayleigh"; }

} // namespace

std::vector<double> SnrGrid::values() const
{
    std::vector<double> out;
    if (!(step > 0.0) || stop < start)
        return out;
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(start + double(i) * step);
    return out;
}

RunCounts RunCounts::paper_scale() { return RunCounts{100000, 30000000, 1000, 700}; }

std::string ExperimentConfig::canonical() const
{
    std::ostringstream os;
    os.precision(17);
    os << "waveform " << waveform.n_fft << ' ' << waveform.m_alloc << ' ' << waveform.cp_len << ' '
       << waveform.alloc_start << '\n';
    os << "constellation " << constellation << '\n';
    os << "grid_semi " << grid_semi.start << ' ' << grid_semi.step << ' ' << grid_semi.stop << '\n';
    os << "grid_full " << grid_full.start << ' ' << grid_full.step << ' ' << grid_full.stop << '\n';
    os << "counts " << counts.full_frames_per_snr << ' ' << counts.semi_channels_per_snr << ' '
       << counts.semi_interf_samples << ' ' << counts.semi_chunk << '\n';
    for (const auto& s : scenarios)
    {
        os << "scenario " << s.name << ' ' << s.channel.l_d << ' ' << fading_name(s.channel.fading);
        for (const auto& r : s.channel.repeaters)
            os << ' ' << r.delay << ':' << r.gain << ':' << r.l_ur << ':' << r.l_rg;
        os << '\n';
    }
    return os.str();
}

std::uint64_t ExperimentConfig::digest() const
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canonical())
    {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void validate(const ExperimentConfig& cfg)
{
    cfg.waveform.validate();
    if (cfg.scenarios.empty())
        throw ConfigError("config: no scenarios defined");
    ConstellationSpec::from_name(cfg.constellation);
    for (const auto* g : {&cfg.grid_semi, &cfg.grid_full})
    {
        if (!(g->step > 0.0))
            throw ConfigError("config: SNR grid step must be > 0");
        if (g->stop < g->start)
            throw ConfigError("config: SNR grid stop must be >= start");
    }
    const auto& c = cfg.counts;
    if (c.full_frames_per_snr < 1 || c.semi_channels_per_snr < 1 || c.semi_interf_samples < 1 || c.semi_chunk < 1)
        throw ConfigError("config: all counts must be >= 1");
    std::set<std::string> names;
    for (const auto& s : cfg.scenarios)
    {
        if (!valid_scenario_name(s.name))
            throw ConfigError("config: invalid scenario name '" + s.name + "'");
        if (!names.insert(s.name).second)
            throw ConfigError("config: duplicate scenario '" + s.name + "'");
        if (s.channel.n_fft != cfg.waveform.n_fft || s.channel.cp_len != cfg.waveform.cp_len)
            throw ConfigError("scenario '" + s.name + "': n_fft/cp_len differ from [waveform]");
        try
        {
            s.channel.validate();
        }
        catch (const ConfigError& e)
        {
            throw ConfigError("scenario '" + s.name + "': " + e.what());
        }
    }
}

ExperimentConfig parse_config_text(const std::string& text, const ParseOptions& options)
{
    pt::ptree tree;
    try
    {
        std::istringstream is(text);
        pt::read_ini(is, tree);
    }
    catch (const pt::ini_parser_error& e)
    {
        throw ConfigError(std::string("config: malformed file: ") + e.what());
    }

    ExperimentConfig cfg;
    std::optional<RunCounts> paper_counts;
    for (const auto& [section, body] : tree)
    {
        if (section == "waveform")
        {
            check_keys(body, section, {"n_fft", "m_alloc", "cp_len", "alloc_start"});
            auto& w = cfg.waveform;
            w.n_fft = to_int(body.get<std::string>("n_fft", std::to_string(w.n_fft)), "waveform.n_fft");
            w.m_alloc = to_int(body.get<std::string>("m_alloc", std::to_string(w.m_alloc)), "waveform.m_alloc");
            w.cp_len = to_int(body.get<std::string>("cp_len", std::to_string(w.cp_len)), "waveform.cp_len");
            w.alloc_start =
                to_int(body.get<std::string>("alloc_start", std::to_string(w.alloc_start)), "waveform.alloc_start");
        }
        else if (section == "modulation")
        {
            check_keys(body, section, {"constellation"});
            cfg.constellation = trim(body.get<std::string>("constellation", cfg.constellation));
        }
        else if (section == "grid")
        {
            check_keys(body, section, {"semi", "full"});
            if (auto v = body.get_optional<std::string>("semi"))
                cfg.grid_semi = to_grid(*v, "grid.semi");
            if (auto v = body.get_optional<std::string>("full"))
                cfg.grid_full = to_grid(*v, "grid.full");
        }
        else if (section == "counts")
        {
            read_counts(body, section, cfg.counts);
        }
        else if (section == "paper_counts")
        {
            RunCounts pc = RunCounts::paper_scale();
            read_counts(body, section, pc);
            paper_counts = pc;
        }
        else if (section == "run")
        {
            check_keys(body, section, {"seed", "output_dir"});
            if (auto v = body.get_optional<std::string>("seed"))
                cfg.seed = to_uint(*v, "run.seed");
            cfg.output_dir = trim(body.get<std::string>("output_dir", cfg.output_dir));
        }
        else if (section.rfind("scenario.", 0) == 0)
        {
            check_keys(body, section, {"l_d", "repeaters", "fading"});
            ScenarioConfig sc;
            sc.name = section.substr(9);
            sc.channel.l_d = to_int(body.get<std::string>("l_d", "1"), section + ".l_d");
            sc.channel.repeaters = to_repeaters(body.get<std::string>("repeaters", ""), section + ".repeaters");
            const std::string fading = trim(body.get<std::string>("fading", "rayleigh"));
            if (fading == "rayleigh")
                sc.channel.fading = Fading::rayleigh;
            else if (fading == "fixed")
                sc.channel.fading = Fading::fixed;
            else
                throw ConfigError(section + ".fading: expected rayleigh or fixed, got '" + fading + "'");
            cfg.scenarios.push_back(std::move(sc));
        }
        else
        {
            throw ConfigError("config: unknown section [" + section + "]");
        }
    }
    for (auto& s : cfg.scenarios)
    {
        s.channel.n_fft = cfg.waveform.n_fft;
        s.channel.cp_len = cfg.waveform.cp_len;
    }
    if (options.paper_scale)
        cfg.counts = paper_counts.value_or(RunCounts::paper_scale());
    validate(cfg);
    return cfg;
}

ExperimentConfig parse_and_validate(const std::filesystem::path& path, const ParseOptions& options)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), options);
}

std::string to_string(SweepMode mode) { return mode == SweepMode::semi ? "semi" : "full"; }

RunMode run_mode_from_name(const std::string& name)
{
    if (name == "semi")
        return RunMode::semi;
    if (name == "full")
        return RunMode::full;
    if (name == "both")
        return RunMode::both;
    throw ConfigError("unknown mode '" + name + "' (expected semi, full or both)");
}

CurveKind curve_kind_from_name(const std::string& name)
{
    if (name == "ber")
        return CurveKind::ber;
    if (name == "diversity")
        return CurveKind::diversity;
    throw ConfigError("unknown curve kind '" + name + "' (expected ber or diversity)");
}

std::vector<SweepResult> ResultsFile::sweeps() const
{
    std::vector<SweepResult> out;
    for (const auto& row : rows)
    {
        if (out.empty() || out.back().scenario != row.scenario || out.back().mode != row.mode)
            out.push_back(SweepResult{row.scenario, row.mode, {}, digest, seed});
        out.back().points.push_back(row.point);
    }
    return out;
}

namespace
{

struct WorkUnit
{
    std::size_t scenario;
    SweepMode mode;
    std::size_t snr_index;
    std::uint64_t chunk;
    std::uint64_t count;
    std::size_t point; // index of the (scenario, mode, snr) point this unit contributes to
};

std::string describe(const ExperimentConfig& cfg, const WorkUnit& u, double snr_db)
{
    std::ostringstream os;
    os << "work unit (scenario=" << cfg.scenarios[u.scenario].name << ", mode=" << to_string(u.mode)
       << ", snr_db=" << fmt9(snr_db) << ", chunk=" << u.chunk << ")";
    return os.str();
}

} // namespace

ResultsFile run_sweep(const ExperimentConfig& cfg, const RunOptions& options)
{
    validate(cfg);
    const ConstellationSpec constellation = ConstellationSpec::from_name(cfg.constellation);
    const auto semi_grid = cfg.grid_semi.values();
    const auto full_grid = cfg.grid_full.values();

    std::vector<SweepMode> modes;
    if (options.mode != RunMode::semi)
        modes.push_back(SweepMode::full);
    if (options.mode != RunMode::full)
        modes.push_back(SweepMode::semi);

    struct PointSlot
    {
        std::size_t scenario;
        SweepMode mode;
        double snr_db;
        std::size_t first_unit = 0;
        std::size_t n_units = 0;
    };
    std::vector<PointSlot> points;
    std::vector<WorkUnit> units;
    for (std::size_t s = 0; s < cfg.scenarios.size(); ++s)
        for (SweepMode mode : modes)
        {
            const auto& grid = mode == SweepMode::semi ? semi_grid : full_grid;
            const std::uint64_t total =
                mode == SweepMode::semi ? cfg.counts.semi_channels_per_snr : cfg.counts.full_frames_per_snr;
            const std::uint64_t chunk = mode == SweepMode::semi ? cfg.counts.semi_chunk : kFullStackChunk;
            for (std::size_t p = 0; p < grid.size(); ++p)
            {
                PointSlot slot{s, mode, grid[p], units.size(), 0};
                for (std::uint64_t start = 0, c = 0; start < total; start += chunk, ++c)
                {
                    units.push_back(WorkUnit{s, mode, p, c, std::min(chunk, total - start), points.size()});
                    ++slot.n_units;
                }
                points.push_back(slot);
            }
        }

    std::vector<SemiAnalyticSum> semi_sums(units.size());
    std::vector<FullStackSum> full_sums(units.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    std::string error_message;

    auto worker = [&] {
        while (!failed.load(std::memory_order_relaxed))
        {
            const std::size_t i = next.fetch_add(1);
            if (i >= units.size())
                return;
            const WorkUnit& u = units[i];
            const double snr_db = points[u.point].snr_db;
            try
            {
                const ChannelConfig& ch = cfg.scenarios[u.scenario].channel;
                SeededRng rng(cfg.seed, substream_id(u.scenario, u.mode == SweepMode::semi ? 1 : 2, u.snr_index, u.chunk));
                if (u.mode == SweepMode::semi)
                    semi_sums[i] = semi_analytic_block(ch, cfg.waveform, constellation, snr_db, u.count,
                                                       cfg.counts.semi_interf_samples, rng);
                else
                    full_sums[i] = full_stack_block(ch, cfg.waveform, constellation, snr_db, u.count, rng);
            }
            catch (const std::exception& e)
            {
                std::lock_guard lock(error_mutex);
                if (!failed.exchange(true))
                    error_message = describe(cfg, u, snr_db) + ": " + e.what();
            }
        }
    };

    const unsigned n_workers = std::max(1u, options.workers);
    if (n_workers == 1)
        worker();
    else
    {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < n_workers; ++w)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }
    if (failed)
        throw RunError(error_message);

    ResultsFile out;
    out.digest = cfg.digest();
    out.seed = cfg.seed;
    out.tool_version = RADIV_VERSION;
    for (const auto& slot : points)
    {
        ResultRow row;
        row.scenario = cfg.scenarios[slot.scenario].name;
        row.mode = slot.mode;
        if (slot.mode == SweepMode::semi)
        {
            SemiAnalyticSum total;
            for (std::size_t i = slot.first_unit; i < slot.first_unit + slot.n_units; ++i)
                total.merge(semi_sums[i]);
            row.point = total.finalize(slot.snr_db);
        }
        else
        {
            FullStackSum total;
            for (std::size_t i = slot.first_unit; i < slot.first_unit + slot.n_units; ++i)
                total.merge(full_sums[i]);
            row.point = total.finalize(slot.snr_db);
        }
        if (slot.snr_db > 0.0 && row.point.ber > 0.0 && row.point.ber < 1.0)
            row.diversity = diversity_metric(row.point.ber, slot.snr_db);
        out.rows.push_back(std::move(row));
    }
    return out;
}

std::string format_results(const ResultsFile& results)
{
    std::ostringstream os;
    os << "# radiv-results v1 tool=" << results.tool_version << " digest=" << hex64(results.digest)
       << " seed=" << results.seed << '\n';
    os << "scenario,mode,snr_db,ber,n_effective,half_width,diversity\n";
    for (const auto& r : results.rows)
    {
        os << r.scenario << ',' << to_string(r.mode) << ',' << fmt9(r.point.snr_db) << ',' << fmt9(r.point.ber) << ','
           << r.point.n_effective << ',' << fmt9(r.point.half_width) << ',';
        if (r.diversity)
            os << fmt9(*r.diversity);
        os << '\n';
    }
    return os.str();
}

ResultsFile parse_results(const std::string& text)
{
    std::istringstream is(text);
    std::string line;
    ResultsFile out;
    if (!std::getline(is, line) || line.rfind("# radiv-results v1 ", 0) != 0)
        throw ConfigError("results: missing header line");
    for (const auto& field : split(line.substr(19), ' '))
    {
        const auto eq = field.find('=');
        if (eq == std::string::npos)
            continue;
        const std::string key = field.substr(0, eq), value = field.substr(eq + 1);
        if (key == "tool")
            out.tool_version = value;
        else if (key == "digest")
            out.digest = std::stoull(value, nullptr, 16);
        else if (key == "seed")
            out.seed = to_uint(value, "results seed");
    }
    if (!std::getline(is, line) || trim(line) != "scenario,mode,snr_db,ber,n_effective,half_width,diversity")
        throw ConfigError("results: missing column header");
    while (std::getline(is, line))
    {
        if (trim(line).empty())
            continue;
        const auto f = split(line, ',');
        if (f.size() != 7)
            throw ConfigError("results: malformed row '" + line + "'");
        ResultRow r;
        r.scenario = f[0];
        if (f[1] == "semi")
            r.mode = SweepMode::semi;
        else if (f[1] == "full")
            r.mode = SweepMode::full;
        else
            throw ConfigError("results: unknown mode '" + f[1] + "'");
        r.point.snr_db = to_double(f[2], "results snr_db");
        r.point.ber = to_double(f[3], "results ber");
        r.point.n_effective = to_uint(f[4], "results n_effective");
        r.point.half_width = to_double(f[5], "results half_width");
        if (!f[6].empty())
            r.diversity = to_double(f[6], "results diversity");
        out.rows.push_back(std::move(r));
    }
    return out;
}

void write_results(const ResultsFile& results, const std::filesystem::path& path)
{
    namespace fs = std::filesystem;
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("results: cannot write '" + tmp.string() + "'");
        out << format_results(results);
        out.flush();
        if (!out)
            throw std::runtime_error("results: write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, path);
}

ResultsFile read_results(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("results: cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_results(ss.str());
}

std::vector<std::filesystem::path> emit_curves(const ResultsFile& results, CurveKind kind,
                                               const std::filesystem::path& out_dir)
{
    if (results.rows.empty())
        throw ConfigError("curves: results file has no rows");
    std::vector<std::string> order;
    std::map<std::string, std::vector<const ResultRow*>> by_scenario;
    for (const auto& r : results.rows)
    {
        if (!by_scenario.count(r.scenario))
            order.push_back(r.scenario);
        by_scenario[r.scenario].push_back(&r);
    }

    std::filesystem::create_directories(out_dir);
    const std::string kind_name = kind == CurveKind::ber ? "ber" : "diversity";
    std::vector<std::filesystem::path> written;
    for (const auto& name : order)
    {
        std::ostringstream os;
        os << "# scenario=" << name << " kind=" << kind_name << " digest=" << hex64(results.digest)
           << " seed=" << results.seed << '\n';
        std::size_t n_rows = 0;
        const std::vector<SweepMode> modes =
            kind == CurveKind::ber ? std::vector<SweepMode>{SweepMode::semi, SweepMode::full}
                                   : std::vector<SweepMode>{SweepMode::semi};
        bool first_block = true;
        for (SweepMode mode : modes)
        {
            std::ostringstream block;
            std::size_t block_rows = 0;
            for (const ResultRow* r : by_scenario[name])
            {
                if (r->mode != mode)
                    continue;
                if (kind == CurveKind::ber)
                {
                    block << fmt9(r->point.snr_db) << ' ' << fmt9(r->point.ber) << ' ' << fmt9(r->point.half_width)
                          << '\n';
                }
                else
                {
                    if (!r->diversity)
                        continue;
                    // First-order propagation of the BER half-width through -ln(p)/ln(gamma).
                    const double ln_gamma = std::log(10.0) * r->point.snr_db / 10.0;
                    const double hw = r->point.half_width / (r->point.ber * ln_gamma);
                    block << fmt9(r->point.snr_db) << ' ' << fmt9(*r->diversity) << ' ' << fmt9(hw) << '\n';
                }
                ++block_rows;
            }
            if (block_rows == 0)
                continue;
            if (!first_block)
                os << "\n\n";
            first_block = false;
            os << "# mode=" << to_string(mode) << "\n# snr_db value half_width\n" << block.str();
            n_rows += block_rows;
        }
        if (n_rows == 0)
            continue;
        const auto path = out_dir / (name + "_" + kind_name + ".dat");
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("curves: cannot write '" + path.string() + "'");
        out << os.str();
        written.push_back(path);
    }
    if (written.empty())
        throw ConfigError("curves: no rows usable for kind '" + kind_name + "'");
    return written;
}

} // namespace radiv
