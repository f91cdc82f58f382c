def average(values):
    total = 0
    for v in values:
        total += v
    return total / len(values)


def report(values):
    if not values:
        return "empty"
    return "mean=%.2f" % average(values)


print(report([1, 2, 3]))
