class Name:
    pass

class If:
    pass

class Visitor:
    def visit(self, node):
        method = 'visit_' + node.__class__.__name__
        visitor = getattr(self, method, self.generic_visit)
        return visitor(node)

    def visit_If(self, node):
        return 1

    def visit_Name(self, node):
        return 2

    def visit_Call(self, node):
        return 3

    def generic_visit(self, node):
        return None

def main():
    v = Visitor()
    v.visit(Name())
    v.visit(If())
