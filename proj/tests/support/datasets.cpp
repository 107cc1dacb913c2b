#include "support/datasets.hpp"

#include <algorithm>

#include "support/paths.hpp"
#include "wfwl/vocabulary.hpp"

namespace wfwl::test {
namespace {

Term iri(std::string_view s) { return Term::iri(std::string(s)); }
Term ex(const std::string& local) { return Term::iri(kEx + local); }
RawTriple triple(Term s, Term p, Term o) { return {std::move(s), std::move(p), std::move(o)}; }

template <class T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& v) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

int uniform(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
bool chance(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

}  // namespace

Dataset random_dataset(std::mt19937_64& rng, const RandomConfig& config) {
  Dataset d;
  const Term sub_class = iri(vocab::kRdfsSubClassOf), sub_prop = iri(vocab::kRdfsSubPropertyOf);
  const Term type = iri(vocab::kRdfType), domain = iri(vocab::kRdfsDomain), range = iri(vocab::kRdfsRange);

  // Concepts in levels; level k > 0 concepts have a parent at level k - 1.
  int n_concepts = uniform(rng, 3, config.max_concepts);
  int depth = uniform(rng, 1, config.max_depth);
  std::vector<std::vector<int>> levels(static_cast<std::size_t>(depth));
  for (int i = 0; i < n_concepts; ++i) {
    std::size_t level = i < depth ? static_cast<std::size_t>(i) : static_cast<std::size_t>(uniform(rng, 0, depth - 1));
    levels[level].push_back(i);
    d.concepts.push_back(std::string(kEx) + "C" + std::to_string(i));
  }
  for (int i = 0; i < n_concepts; ++i)
    d.tbox.push_back(triple(iri(d.concepts[i]), type, iri(vocab::kOwlClass)));
  for (std::size_t level = 1; level < levels.size(); ++level) {
    for (int c : levels[level]) {
      int parent = pick(rng, levels[level - 1]);
      d.tbox.push_back(triple(iri(d.concepts[c]), sub_class, iri(d.concepts[parent])));
      if (chance(rng, config.multi)) {
        const auto& from = levels[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(level) - 1))];
        int other = pick(rng, from);
        if (other != parent) d.tbox.push_back(triple(iri(d.concepts[c]), sub_class, iri(d.concepts[other])));
      }
    }
  }

  // Properties: object or datatype, sub-properties within the same kind.
  int n_properties = uniform(rng, 1, config.max_properties);
  std::vector<bool> is_object;
  for (int i = 0; i < n_properties; ++i) {
    d.properties.push_back(std::string(kEx) + "p" + std::to_string(i));
    is_object.push_back(chance(rng, 0.7));
    const Term p = iri(d.properties.back());
    d.tbox.push_back(
        triple(p, type, iri(is_object.back() ? vocab::kOwlObjectProperty : vocab::kOwlDatatypeProperty)));
    if (i > 0 && chance(rng, 0.4)) {
      std::vector<int> same;
      for (int j = 0; j < i; ++j)
        if (is_object[static_cast<std::size_t>(j)] == is_object.back()) same.push_back(j);
      if (!same.empty()) {
        int parent = pick(rng, same);
        d.tbox.push_back(triple(p, sub_prop, iri(d.properties[static_cast<std::size_t>(parent)])));
        if (chance(rng, config.multi)) {
          int other = pick(rng, same);
          if (other != parent) d.tbox.push_back(triple(p, sub_prop, iri(d.properties[static_cast<std::size_t>(other)])));
        }
      }
    }
    if (chance(rng, 0.5)) d.tbox.push_back(triple(p, domain, iri(pick(rng, d.concepts))));
    if (is_object.back()) {
      if (chance(rng, 0.5)) d.tbox.push_back(triple(p, range, iri(pick(rng, d.concepts))));
    } else if (chance(rng, 0.5)) {
      d.tbox.push_back(triple(p, range, iri(vocab::kRdfsLiteral)));
    }
  }

  // Data.
  std::size_t n_triples = static_cast<std::size_t>(uniform(rng, 1, static_cast<int>(config.max_triples)));
  int n_instances = std::max(2, static_cast<int>(n_triples / 4));
  std::vector<std::string> literals{"a", "b", "hello", "x y"};
  for (std::size_t t = 0; t < n_triples; ++t) {
    Term s = ex("i" + std::to_string(uniform(rng, 0, n_instances - 1)));
    if (chance(rng, 0.3)) {
      d.abox.push_back(triple(std::move(s), type, iri(pick(rng, d.concepts))));
      continue;
    }
    auto p = static_cast<std::size_t>(uniform(rng, 0, n_properties - 1));
    Term o;
    if (is_object[p]) {
      o = ex("i" + std::to_string(uniform(rng, 0, n_instances - 1)));
    } else {
      switch (uniform(rng, 0, 3)) {
        case 0: o = Term::literal(pick(rng, literals)); break;
        case 1: o = Term::literal(std::to_string(uniform(rng, 0, 20)), std::string(vocab::kXsd) + "integer"); break;
        case 2: o = Term::literal(pick(rng, literals), {}, "en"); break;
        default: o = Term::literal("v" + std::to_string(uniform(rng, 0, 50))); break;
      }
    }
    d.abox.push_back(triple(std::move(s), iri(d.properties[p]), std::move(o)));
  }
  return d;
}

std::vector<RawTriple> lubm_dataset(std::size_t target_triples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<RawTriple> out;
  const Term type = iri(vocab::kRdfType);
  auto u = [](const std::string& local) { return Term::iri(ub(local)); };
  auto add = [&](Term s, const std::string& p, Term o) { out.push_back(triple(std::move(s), u(p), std::move(o))); };
  auto lit = [](std::string s) { return Term::literal(std::move(s)); };
  auto univ_iri = [](int n) { return Term::iri("http://www.University" + std::to_string(n) + ".edu"); };

  // Universities referenced by degrees include ones not yet generated.
  const int degree_universities = 20;
  for (int un = 0; out.size() < target_triples; ++un) {
    Term univ = univ_iri(un);
    out.push_back(triple(univ, type, u("University")));
    add(univ, "name", lit("University" + std::to_string(un)));
    int n_dept = uniform(rng, 3, 5);
    for (int dn = 0; dn < n_dept; ++dn) {
      std::string base = "http://www.Department" + std::to_string(dn) + ".University" + std::to_string(un) + ".edu";
      Term dept = Term::iri(base);
      auto local = [&](const std::string& name, int i) { return Term::iri(base + "/" + name + std::to_string(i)); };
      out.push_back(triple(dept, type, u("Department")));
      add(dept, "name", lit("Department" + std::to_string(dn)));
      add(dept, "subOrganizationOf", univ);

      std::vector<Term> courses, grad_courses, faculty, professors;
      int n_courses = uniform(rng, 10, 14), n_grad_courses = uniform(rng, 6, 9);
      for (int i = 0; i < n_courses; ++i) {
        courses.push_back(local("Course", i));
        out.push_back(triple(courses.back(), type, u("Course")));
        add(courses.back(), "name", lit("Course" + std::to_string(i)));
      }
      for (int i = 0; i < n_grad_courses; ++i) {
        grad_courses.push_back(local("GraduateCourse", i));
        out.push_back(triple(grad_courses.back(), type, u("GraduateCourse")));
        add(grad_courses.back(), "name", lit("GraduateCourse" + std::to_string(i)));
      }
      for (int i = 0, n = uniform(rng, 2, 4); i < n; ++i) {
        Term g = local("ResearchGroup", i);
        out.push_back(triple(g, type, u("ResearchGroup")));
        add(g, "subOrganizationOf", dept);
      }

      const std::pair<const char*, int> ranks[] = {
          {"FullProfessor", uniform(rng, 4, 6)}, {"AssociateProfessor", uniform(rng, 5, 8)},
          {"AssistantProfessor", uniform(rng, 4, 6)}, {"Lecturer", uniform(rng, 3, 5)}};
      int course_cursor = 0, grad_cursor = 0;
      for (const auto& [rank, count] : ranks) {
        for (int i = 0; i < count; ++i) {
          Term f = local(rank, i);
          std::string name = std::string(rank) + std::to_string(i);
          out.push_back(triple(f, type, u(rank)));
          add(f, "name", lit(name));
          add(f, "emailAddress", lit(name + "@" + base.substr(11)));
          add(f, "telephone", lit("xxx-xxx-" + std::to_string(uniform(rng, 1000, 9999))));
          add(f, std::string(rank) == "FullProfessor" && i == 0 ? "headOf" : "worksFor", dept);
          add(f, "undergraduateDegreeFrom", univ_iri(uniform(rng, 0, degree_universities - 1)));
          if (std::string(rank) != "Lecturer") {
            add(f, "mastersDegreeFrom", univ_iri(uniform(rng, 0, degree_universities - 1)));
            add(f, "doctoralDegreeFrom", univ_iri(uniform(rng, 0, degree_universities - 1)));
            add(f, "researchInterest", lit("Research" + std::to_string(uniform(rng, 0, 30))));
            professors.push_back(f);
          }
          if (course_cursor < n_courses) add(f, "teacherOf", courses[static_cast<std::size_t>(course_cursor++)]);
          if (grad_cursor < n_grad_courses) add(f, "teacherOf", grad_courses[static_cast<std::size_t>(grad_cursor++)]);
          faculty.push_back(f);
          for (int k = 0, n = uniform(rng, 1, 5); k < n; ++k) {
            Term pub = Term::iri(base + "/" + name + "/Publication" + std::to_string(k));
            out.push_back(triple(pub, type, u("Publication")));
            add(pub, "name", lit("Publication" + std::to_string(k)));
            add(pub, "publicationAuthor", f);
          }
        }
      }
      for (; course_cursor < n_courses; ++course_cursor)
        add(pick(rng, faculty), "teacherOf", courses[static_cast<std::size_t>(course_cursor)]);
      for (; grad_cursor < n_grad_courses; ++grad_cursor)
        add(pick(rng, faculty), "teacherOf", grad_courses[static_cast<std::size_t>(grad_cursor)]);

      for (int i = 0, n = uniform(rng, 50, 70); i < n; ++i) {
        Term s = local("UndergraduateStudent", i);
        std::string name = "UndergraduateStudent" + std::to_string(i);
        out.push_back(triple(s, type, u("UndergraduateStudent")));
        add(s, "name", lit(name));
        add(s, "emailAddress", lit(name + "@" + base.substr(11)));
        add(s, "telephone", lit("xxx-xxx-" + std::to_string(uniform(rng, 1000, 9999))));
        add(s, "memberOf", dept);
        for (int k = uniform(rng, 2, 4); k > 0; --k) add(s, "takesCourse", pick(rng, courses));
        if (chance(rng, 0.2)) add(s, "advisor", pick(rng, professors));
      }
      for (int i = 0, n = uniform(rng, 15, 22); i < n; ++i) {
        Term s = local("GraduateStudent", i);
        std::string name = "GraduateStudent" + std::to_string(i);
        out.push_back(triple(s, type, u("GraduateStudent")));
        add(s, "name", lit(name));
        add(s, "emailAddress", lit(name + "@" + base.substr(11)));
        add(s, "telephone", lit("xxx-xxx-" + std::to_string(uniform(rng, 1000, 9999))));
        add(s, "memberOf", dept);
        int from = chance(rng, 0.3) ? un : uniform(rng, 0, degree_universities - 1);
        add(s, "undergraduateDegreeFrom", univ_iri(from));
        for (int k = uniform(rng, 1, 3); k > 0; --k) add(s, "takesCourse", pick(rng, grad_courses));
        add(s, "advisor", pick(rng, professors));
        if (chance(rng, 0.25)) add(s, "teachingAssistantOf", pick(rng, courses));
      }
    }
  }
  return out;
}

std::vector<std::pair<int, std::string>> lubm_queries() {
  const std::string prefix = "PREFIX rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#>\nPREFIX lubm: <" +
                             std::string(kUb) + ">\n";
  return {
      {1, prefix + "SELECT ?x WHERE { ?x rdf:type lubm:GraduateStudent . "
                   "?x lubm:takesCourse <http://www.Department0.University0.edu/GraduateCourse0> . }"},
      {2, prefix + "SELECT ?x ?y ?z WHERE { ?x rdf:type lubm:GraduateStudent . ?y rdf:type lubm:University . "
                   "?z rdf:type lubm:Department . ?x lubm:memberOf ?z . ?z lubm:subOrganizationOf ?y . "
                   "?x lubm:undergraduateDegreeFrom ?y . }"},
      {4, prefix + "SELECT ?x ?y1 ?y2 ?y3 WHERE { ?x rdf:type lubm:Professor . "
                   "?x lubm:worksFor <http://www.Department0.University0.edu> . ?x lubm:name ?y1 . "
                   "?x lubm:emailAddress ?y2 . ?x lubm:telephone ?y3 . }"},
      {5, prefix + "SELECT ?x WHERE { ?x rdf:type lubm:Person . "
                   "?x lubm:memberOf <http://www.Department0.University0.edu> . }"},
      {6, prefix + "SELECT ?x WHERE { ?x rdf:type lubm:Student . }"},
      {7, prefix + "SELECT ?x ?y WHERE { ?x rdf:type lubm:Student . ?y rdf:type lubm:Course . "
                   "<http://www.Department0.University0.edu/AssociateProfessor0> lubm:teacherOf ?y . "
                   "?x lubm:takesCourse ?y . }"},
      {10, prefix + "SELECT ?x WHERE { ?x rdf:type lubm:Student . "
                    "?x lubm:takesCourse <http://www.Department0.University0.edu/GraduateCourse0> . }"},
      {14, prefix + "SELECT ?x WHERE { ?x rdf:type lubm:UndergraduateStudent . }"},
  };
}

std::string write_ntriples(const std::vector<RawTriple>& triples) {
  std::string out;
  for (const auto& t : triples) out += to_ntriples(t) + "\n";
  return out;
}

}  // namespace wfwl::test
