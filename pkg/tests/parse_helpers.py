from acdeduce.parse import parse_term


def parse_all(th, *texts):
    return [parse_term(t, th.signature) for t in texts]
